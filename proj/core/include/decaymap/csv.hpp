#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace decaymap::csv {

// Minimal RFC-4180-ish CSV: fields with comma, quote or newline are quoted,
// embedded quotes doubled. Enough to round-trip arbitrary repository paths.

std::string escape_field(const std::string& field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Returns std::nullopt at end of stream. Handles quoted fields spanning lines.
std::optional<std::vector<std::string>> read_row(std::istream& in);

} // namespace decaymap::csv
