#pragma once

#include "decaymap/types.hpp"

#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string_view>

namespace decaymap {

struct ParseOptions {
    // Abort when more than this fraction of non-empty lines is malformed.
    double max_malformed_fraction = 0.10;
    // Flag name echoed in the abort message so the operator knows what to relax.
    std::string threshold_flag_name = "--max-malformed-frac";
};

struct ParseResult {
    std::vector<CommitRecord> records; // non-decreasing timestamp order
    std::size_t malformed_count = 0;
    std::size_t filtered_count = 0;    // merge-flagged or empty file list
};

// One JSON object per line: {"id","author","ts","title","tags","files",
// "outage_level"?, "merge"?}. Malformed lines are skipped and counted;
// the stream being unreadable or the malformed fraction exceeding the
// threshold is fatal.
ParseResult parse_commit_log(std::istream& in, const ParseOptions& opts = {});

// Inverse of parse_commit_log for all schema fields; lossless round-trip.
void serialize_commit_log(std::ostream& out, std::span<const CommitRecord> records);

class FileIdentityMap {
public:
    IdentityId resolve_at(std::string_view path, Timestamp ts) const;      // throws on unknown path/time
    std::optional<IdentityId> try_resolve_current(std::string_view path) const;
    const std::string& current_path(IdentityId id) const;
    std::size_t identity_count() const { return current_path_.size(); }

    void save(std::ostream& out) const;
    static FileIdentityMap load(std::istream& in);

private:
    friend FileIdentityMap build_rename_chains(std::span<const CommitRecord>);

    struct Epoch { Timestamp from_ts; IdentityId id; };

    IdentityId new_identity(const std::string& path, Timestamp ts);
    void record_epoch(const std::string& path, Timestamp ts, IdentityId id);

    std::map<std::string, std::vector<Epoch>, std::less<>> epochs_;
    std::vector<std::string> current_path_;           // by identity
    std::map<std::string, IdentityId, std::less<>> live_; // live name -> identity
};

// Replays the timestamp-ordered history. Renames chain identities (a->b->c is
// one identity named c); a second rename from the same source within one commit
// is a copy and mints a fresh identity for its target; two renames landing on
// one target within one commit are fatal.
FileIdentityMap build_rename_chains(std::span<const CommitRecord> commits);

// Distinct identities touched by a commit, sorted.
std::vector<IdentityId> touched_identities(const CommitRecord& commit, const FileIdentityMap& ids);

// Rewrites every path to the identity's final name and renames to plain
// modifies; the flattened corpus replays to the same per-identity history.
std::vector<CommitRecord> flatten_to_current_names(std::span<const CommitRecord> commits,
                                                   const FileIdentityMap& ids);

struct ActivityStats {
    double dat_proxy_minutes = 0;
    std::uint32_t session_count = 1;
    std::uint64_t session_index = 0; // author-session the commit belongs to
};

// Commit-gap sessionization proxy for diff authoring time. A session is a
// maximal same-author run with inter-commit gap <= gap_minutes; the proxy for
// a commit is min(gap to previous same-author commit, gap_minutes) +
// floor_minutes, and an author's first commit gets floor_minutes.
std::map<std::string, ActivityStats>
sessionize_author_activity(std::span<const CommitRecord> commits,
                           double gap_minutes = 120.0, double floor_minutes = 5.0);

struct Roster {
    // author -> departure timestamp; absent entry or nullopt = still present
    std::map<std::string, std::optional<Timestamp>> departed;

    bool is_departed(const std::string& author, Timestamp as_of) const;
};

// CSV `author,departed_ts`, empty departed_ts = still present.
Roster load_roster(std::istream& in);

} // namespace decaymap
