#pragma once

#include <string>

namespace hardylab {

/// Write via a sibling temporary file and rename, so readers never see partial output.
void write_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace hardylab
