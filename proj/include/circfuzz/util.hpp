#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace circfuzz {

using Bytes = std::vector<std::uint8_t>;

std::string base64_encode(const Bytes& data);
std::string base64_encode(const std::string& data);
// Throws ParseError on malformed input.
Bytes base64_decode(const std::string& text);

std::string to_hex(const Bytes& data);

// SHA-256 digest as lowercase hex.
std::string sha256_hex(const std::string& data);

std::string read_file(const std::string& path);           // throws IoError
void write_file(const std::string& path, const std::string& data);  // throws IoError

std::string bytes_to_string(const Bytes& b);
Bytes string_to_bytes(const std::string& s);

}  // namespace circfuzz
