#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace decaymap {

/// Fatal toolchain error. Non-fatal conditions (malformed lines, unresolved
/// paths, unreadable files) are counted and reported in result structs instead.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

using Timestamp = std::int64_t;   // seconds since epoch, UTC
using IdentityId = std::uint32_t; // stable file identity across renames

enum class ChangeKind : std::uint8_t { modify, add, remove, rename };

struct FileChange {
    std::optional<std::string> path_before;
    std::optional<std::string> path_after;
    std::uint32_t lines_added = 0;
    std::uint32_t lines_deleted = 0;
    ChangeKind kind = ChangeKind::modify;

    // The path a consumer should resolve against the identity map.
    const std::string& effective_path() const {
        return path_after ? *path_after : *path_before;
    }

    bool operator==(const FileChange&) const = default;
};

struct OutageAnnotation {
    std::uint32_t severity_level = 1; // 1 = most severe
    bool operator==(const OutageAnnotation&) const = default;
};

struct CommitRecord {
    std::string commit_id;
    std::string author_id;
    Timestamp timestamp = 0;
    std::string message_title;
    std::vector<std::string> message_tags;
    std::vector<FileChange> file_changes;
    std::optional<OutageAnnotation> outage;

    bool operator==(const CommitRecord&) const = default;
};

std::string_view to_string(ChangeKind kind);
std::optional<ChangeKind> change_kind_from_string(std::string_view s);

} // namespace decaymap
