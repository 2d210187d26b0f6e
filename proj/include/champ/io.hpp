#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace champ {

// Whole-file read/write. Both throw champ::Error on I/O failure.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace champ
