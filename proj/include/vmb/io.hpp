#pragma once
// Small serialization helpers: hashing, exact double formatting, files.
#include <cstdint>
#include <string>
#include <vector>

namespace vmb {

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h = 1469598103934665603ull);
std::string hex64(std::uint64_t v);

// shortest text that parses back to the same double
std::string format_double(double x);
double parse_double(const std::string& s);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
void ensure_directory(const std::string& dir);

}  // namespace vmb
