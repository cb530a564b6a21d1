#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cqj::detail {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char delim);
/// Splits on '\n' and strips a trailing '\r'. A final empty line is dropped.
std::vector<std::string_view> split_lines(std::string_view text);
std::string to_lower(std::string_view s);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);
/// "%.4f" that never prints a negative zero.
std::string fixed4(double v);

}  // namespace cqj::detail
