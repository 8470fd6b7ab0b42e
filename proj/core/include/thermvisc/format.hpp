#pragma once

#include <string>

namespace thermvisc {

// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace thermvisc
