#include "decaymap/ingest.hpp"

#include "decaymap/csv.hpp"
#include "decaymap/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>

namespace decaymap {

using nlohmann::json;

std::string_view to_string(ChangeKind kind) {
    switch (kind) {
        case ChangeKind::modify: return "modify";
        case ChangeKind::add: return "add";
        case ChangeKind::remove: return "delete";
        case ChangeKind::rename: return "rename";
    }
    return "modify";
}

std::optional<ChangeKind> change_kind_from_string(std::string_view s) {
    if (s == "modify") return ChangeKind::modify;
    if (s == "add") return ChangeKind::add;
    if (s == "delete") return ChangeKind::remove;
    if (s == "rename") return ChangeKind::rename;
    return std::nullopt;
}

namespace {

std::optional<FileChange> parse_file_change(const json& jf) {
    if (!jf.is_object()) return std::nullopt;
    FileChange fc;
    if (jf.contains("before") && !jf["before"].is_null()) {
        if (!jf["before"].is_string()) return std::nullopt;
        fc.path_before = jf["before"].get<std::string>();
    }
    if (jf.contains("after") && !jf["after"].is_null()) {
        if (!jf["after"].is_string()) return std::nullopt;
        fc.path_after = jf["after"].get<std::string>();
    }
    if (jf.contains("add")) {
        if (!jf["add"].is_number_unsigned()) return std::nullopt;
        fc.lines_added = jf["add"].get<std::uint32_t>();
    }
    if (jf.contains("del")) {
        if (!jf["del"].is_number_unsigned()) return std::nullopt;
        fc.lines_deleted = jf["del"].get<std::uint32_t>();
    }
    if (!jf.contains("kind") || !jf["kind"].is_string()) return std::nullopt;
    auto kind = change_kind_from_string(jf["kind"].get<std::string>());
    if (!kind) return std::nullopt;
    fc.kind = *kind;

    switch (fc.kind) {
        case ChangeKind::add:
            if (fc.path_before || !fc.path_after) return std::nullopt;
            break;
        case ChangeKind::remove:
            if (!fc.path_before || fc.path_after) return std::nullopt;
            break;
        case ChangeKind::rename:
            if (!fc.path_before || !fc.path_after || *fc.path_before == *fc.path_after)
                return std::nullopt;
            break;
        case ChangeKind::modify:
            if (!fc.path_before && !fc.path_after) return std::nullopt;
            if (!fc.path_after) fc.path_after = fc.path_before;
            if (!fc.path_before) fc.path_before = fc.path_after;
            if (*fc.path_before != *fc.path_after) return std::nullopt;
            break;
    }
    return fc;
}

std::optional<CommitRecord> parse_commit_object(const json& j, bool& is_merge) {
    if (!j.is_object()) return std::nullopt;
    is_merge = j.contains("merge") && j["merge"].is_boolean() && j["merge"].get<bool>();

    CommitRecord rec;
    if (!j.contains("id") || !j["id"].is_string()) return std::nullopt;
    rec.commit_id = j["id"].get<std::string>();
    if (!j.contains("author") || !j["author"].is_string()) return std::nullopt;
    rec.author_id = j["author"].get<std::string>();
    if (!j.contains("ts") || !j["ts"].is_number_integer()) return std::nullopt;
    rec.timestamp = j["ts"].get<std::int64_t>();
    if (rec.timestamp <= 0) return std::nullopt;
    if (!j.contains("title") || !j["title"].is_string()) return std::nullopt;
    rec.message_title = j["title"].get<std::string>();
    if (j.contains("tags")) {
        if (!j["tags"].is_array()) return std::nullopt;
        for (const auto& t : j["tags"]) {
            if (!t.is_string()) return std::nullopt;
            rec.message_tags.push_back(t.get<std::string>());
        }
    }
    if (!j.contains("files") || !j["files"].is_array()) return std::nullopt;
    for (const auto& jf : j["files"]) {
        auto fc = parse_file_change(jf);
        if (!fc) return std::nullopt;
        rec.file_changes.push_back(std::move(*fc));
    }
    if (j.contains("outage_level") && !j["outage_level"].is_null()) {
        if (!j["outage_level"].is_number_unsigned()) return std::nullopt;
        auto lvl = j["outage_level"].get<std::uint32_t>();
        if (lvl < 1) return std::nullopt;
        rec.outage = OutageAnnotation{lvl};
    }
    return rec;
}

} // namespace

ParseResult parse_commit_log(std::istream& in, const ParseOptions& opts) {
    if (!in.good()) throw Error("parse_commit_log: unreadable input stream");

    ParseResult result;
    std::set<std::string> seen_ids;
    std::string line;
    std::size_t line_count = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++line_count;
        json j = json::parse(line, nullptr, false);
        bool is_merge = false;
        std::optional<CommitRecord> rec;
        if (!j.is_discarded()) rec = parse_commit_object(j, is_merge);
        if (!rec) {
            ++result.malformed_count;
            continue;
        }
        // Duplicate ids violate the corpus invariant; treat as malformed input.
        if (!seen_ids.insert(rec->commit_id).second) {
            ++result.malformed_count;
            continue;
        }
        if (is_merge || rec->file_changes.empty()) {
            ++result.filtered_count;
            continue;
        }
        result.records.push_back(std::move(*rec));
    }
    if (in.bad()) throw Error("parse_commit_log: read error mid-stream");

    if (line_count > 0) {
        double frac = static_cast<double>(result.malformed_count) / static_cast<double>(line_count);
        if (frac > opts.max_malformed_fraction) {
            throw Error("parse_commit_log: " + std::to_string(result.malformed_count) + " of " +
                        std::to_string(line_count) + " lines malformed, above the " +
                        opts.threshold_flag_name + " threshold of " +
                        format_double(opts.max_malformed_fraction));
        }
    }

    std::stable_sort(result.records.begin(), result.records.end(),
                     [](const CommitRecord& a, const CommitRecord& b) { return a.timestamp < b.timestamp; });
    return result;
}

void serialize_commit_log(std::ostream& out, std::span<const CommitRecord> records) {
    for (const CommitRecord& rec : records) {
        json j;
        j["id"] = rec.commit_id;
        j["author"] = rec.author_id;
        j["ts"] = rec.timestamp;
        j["title"] = rec.message_title;
        j["tags"] = rec.message_tags;
        json files = json::array();
        for (const FileChange& fc : rec.file_changes) {
            json jf;
            jf["before"] = fc.path_before ? json(*fc.path_before) : json(nullptr);
            jf["after"] = fc.path_after ? json(*fc.path_after) : json(nullptr);
            jf["add"] = fc.lines_added;
            jf["del"] = fc.lines_deleted;
            jf["kind"] = std::string(to_string(fc.kind));
            files.push_back(std::move(jf));
        }
        j["files"] = std::move(files);
        if (rec.outage) j["outage_level"] = rec.outage->severity_level;
        out << j.dump() << '\n';
    }
}

IdentityId FileIdentityMap::new_identity(const std::string& path, Timestamp ts) {
    IdentityId id = static_cast<IdentityId>(current_path_.size());
    current_path_.push_back(path);
    record_epoch(path, ts, id);
    return id;
}

void FileIdentityMap::record_epoch(const std::string& path, Timestamp ts, IdentityId id) {
    epochs_[path].push_back({ts, id});
}

IdentityId FileIdentityMap::resolve_at(std::string_view path, Timestamp ts) const {
    auto it = epochs_.find(path);
    if (it == epochs_.end())
        throw Error("identity map: unknown path '" + std::string(path) + "'");
    const auto& eps = it->second;
    // Last epoch whose start is <= ts.
    const Epoch* best = nullptr;
    for (const Epoch& e : eps) {
        if (e.from_ts <= ts) best = &e;
        else break;
    }
    if (!best)
        throw Error("identity map: path '" + std::string(path) + "' not known at time " +
                    std::to_string(ts));
    return best->id;
}

std::optional<IdentityId> FileIdentityMap::try_resolve_current(std::string_view path) const {
    auto it = live_.find(path);
    if (it != live_.end()) return it->second;
    // Fall back to the last identity that carried this name (deleted files).
    auto ep = epochs_.find(path);
    if (ep == epochs_.end() || ep->second.empty()) return std::nullopt;
    IdentityId id = ep->second.back().id;
    if (current_path_[id] == path) return id;
    return std::nullopt;
}

const std::string& FileIdentityMap::current_path(IdentityId id) const {
    if (id >= current_path_.size()) throw Error("identity map: bad identity id");
    return current_path_[id];
}

void FileIdentityMap::save(std::ostream& out) const {
    json j;
    json eps = json::object();
    for (const auto& [path, vec] : epochs_) {
        json arr = json::array();
        for (const Epoch& e : vec) arr.push_back(json::array({e.from_ts, e.id}));
        eps[path] = std::move(arr);
    }
    j["epochs"] = std::move(eps);
    j["current_path"] = current_path_;
    json live = json::object();
    for (const auto& [path, id] : live_) live[path] = id;
    j["live"] = std::move(live);
    out << j.dump(2) << '\n';
}

FileIdentityMap FileIdentityMap::load(std::istream& in) {
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error("identity map: invalid JSON");
    FileIdentityMap m;
    m.current_path_ = j.at("current_path").get<std::vector<std::string>>();
    for (const auto& [path, arr] : j.at("epochs").items()) {
        std::vector<Epoch> eps;
        for (const auto& e : arr) eps.push_back({e.at(0).get<Timestamp>(), e.at(1).get<IdentityId>()});
        m.epochs_[path] = std::move(eps);
    }
    for (const auto& [path, id] : j.at("live").items()) m.live_[path] = id.get<IdentityId>();
    return m;
}

FileIdentityMap build_rename_chains(std::span<const CommitRecord> commits) {
    FileIdentityMap map;

    for (const CommitRecord& commit : commits) {
        const Timestamp ts = commit.timestamp;

        // Phase 1: resolve all sources against the pre-commit state so that
        // rename swaps within one commit behave.
        struct PendingRename { IdentityId id; std::string target; bool copy; };
        std::vector<PendingRename> renames;
        std::vector<std::string> removals;
        std::set<std::string> rename_sources_seen;
        std::set<std::string> rename_targets_seen;

        for (const FileChange& fc : commit.file_changes) {
            switch (fc.kind) {
                case ChangeKind::add: {
                    const std::string& p = *fc.path_after;
                    auto it = map.live_.find(p);
                    if (it == map.live_.end()) {
                        IdentityId id = map.new_identity(p, ts);
                        map.live_[p] = id;
                    }
                    break;
                }
                case ChangeKind::modify: {
                    const std::string& p = *fc.path_after;
                    auto it = map.live_.find(p);
                    if (it == map.live_.end()) {
                        // First sight of a pre-existing file.
                        IdentityId id = map.new_identity(p, ts);
                        map.live_[p] = id;
                    }
                    break;
                }
                case ChangeKind::remove: {
                    const std::string& p = *fc.path_before;
                    auto it = map.live_.find(p);
                    if (it == map.live_.end()) {
                        IdentityId id = map.new_identity(p, ts);
                        map.live_[p] = id;
                    }
                    removals.push_back(p);
                    break;
                }
                case ChangeKind::rename: {
                    const std::string& src = *fc.path_before;
                    const std::string& dst = *fc.path_after;
                    if (!rename_targets_seen.insert(dst).second)
                        throw Error("build_rename_chains: conflicting simultaneous renames onto '" +
                                    dst + "' in commit " + commit.commit_id);
                    auto it = map.live_.find(src);
                    IdentityId src_id;
                    if (it == map.live_.end()) {
                        src_id = map.new_identity(src, ts);
                        map.live_[src] = src_id;
                    } else {
                        src_id = it->second;
                    }
                    bool copy = !rename_sources_seen.insert(src).second;
                    renames.push_back({src_id, dst, copy});
                    break;
                }
            }
        }

        // Phase 2: apply moves and removals.
        for (const std::string& p : removals) map.live_.erase(p);
        for (const PendingRename& r : renames) {
            if (r.copy) {
                IdentityId id = map.new_identity(r.target, ts);
                map.live_[r.target] = id;
                continue;
            }
            map.live_.erase(map.current_path_[r.id]);
            map.current_path_[r.id] = r.target;
            map.record_epoch(r.target, ts, r.id);
            map.live_[r.target] = r.id;
        }
    }
    return map;
}

std::vector<IdentityId> touched_identities(const CommitRecord& commit, const FileIdentityMap& ids) {
    std::vector<IdentityId> out;
    for (const FileChange& fc : commit.file_changes) {
        const std::string& path = fc.kind == ChangeKind::remove ? *fc.path_before
                                : fc.kind == ChangeKind::rename ? *fc.path_before
                                                                : *fc.path_after;
        out.push_back(ids.resolve_at(path, commit.timestamp));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<CommitRecord> flatten_to_current_names(std::span<const CommitRecord> commits,
                                                   const FileIdentityMap& ids) {
    std::vector<CommitRecord> out;
    out.reserve(commits.size());
    for (const CommitRecord& commit : commits) {
        CommitRecord flat = commit;
        for (FileChange& fc : flat.file_changes) {
            const std::string& path = fc.kind == ChangeKind::remove ? *fc.path_before
                                    : fc.kind == ChangeKind::rename ? *fc.path_before
                                                                    : *fc.path_after;
            const std::string& name = ids.current_path(ids.resolve_at(path, commit.timestamp));
            switch (fc.kind) {
                case ChangeKind::rename:
                    fc.kind = ChangeKind::modify;
                    fc.path_before = name;
                    fc.path_after = name;
                    break;
                case ChangeKind::add:
                    fc.path_after = name;
                    break;
                case ChangeKind::remove:
                    fc.path_before = name;
                    break;
                case ChangeKind::modify:
                    fc.path_before = name;
                    fc.path_after = name;
                    break;
            }
        }
        out.push_back(std::move(flat));
    }
    return out;
}

std::map<std::string, ActivityStats>
sessionize_author_activity(std::span<const CommitRecord> commits,
                           double gap_minutes, double floor_minutes) {
    if (!(gap_minutes > floor_minutes && floor_minutes > 0))
        throw Error("sessionize_author_activity: requires gap_minutes > floor_minutes > 0");

    // Group commit indices per author, preserving timestamp order.
    std::map<std::string, std::vector<std::size_t>, std::less<>> by_author;
    for (std::size_t i = 0; i < commits.size(); ++i)
        by_author[commits[i].author_id].push_back(i);

    std::map<std::string, ActivityStats> out;
    std::uint64_t next_session = 0;
    for (auto& [author, idxs] : by_author) {
        std::stable_sort(idxs.begin(), idxs.end(), [&](std::size_t a, std::size_t b) {
            return commits[a].timestamp < commits[b].timestamp;
        });
        bool first = true;
        Timestamp prev_ts = 0;
        std::uint64_t session = 0;
        for (std::size_t i : idxs) {
            const CommitRecord& c = commits[i];
            ActivityStats st;
            if (first) {
                st.dat_proxy_minutes = floor_minutes;
                session = next_session++;
                first = false;
            } else {
                double gap = static_cast<double>(c.timestamp - prev_ts) / 60.0;
                st.dat_proxy_minutes = std::min(gap, gap_minutes) + floor_minutes;
                if (gap > gap_minutes) session = next_session++;
            }
            st.session_count = 1;
            st.session_index = session;
            prev_ts = c.timestamp;
            out[c.commit_id] = st;
        }
    }
    return out;
}

bool Roster::is_departed(const std::string& author, Timestamp as_of) const {
    auto it = departed.find(author);
    if (it == departed.end() || !it->second) return false;
    return *it->second <= as_of;
}

Roster load_roster(std::istream& in) {
    if (!in.good()) throw Error("load_roster: unreadable input");
    Roster roster;
    bool first = true;
    while (auto row = csv::read_row(in)) {
        if (row->empty() || (row->size() == 1 && (*row)[0].empty())) continue;
        if (first) {
            first = false;
            if ((*row)[0] == "author") continue; // optional header
        }
        if (row->size() < 1) continue;
        const std::string& author = (*row)[0];
        std::optional<Timestamp> ts;
        if (row->size() >= 2 && !(*row)[1].empty()) ts = parse_int((*row)[1]);
        roster.departed[author] = ts;
    }
    return roster;
}

} // namespace decaymap
