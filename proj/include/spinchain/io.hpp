#pragma once

#include <string>

namespace spinchain {

/// Hex SHA-256 of a byte string (stable across platforms).
std::string sha256_hex(const std::string& bytes);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace spinchain
