#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kwstega {

/// Lowercases ASCII letters, trims, and collapses every whitespace run to a
/// single space. This is the canonical keyword form used for all matching.
std::string canonicalize(std::string_view text);

/// Splits on whitespace; punctuation stays attached to its word.
std::vector<std::string> split_words(std::string_view text);

std::size_t count_words(std::string_view text);

std::string_view trim(std::string_view text);

std::string to_hex(std::span<const std::uint8_t> bytes);

/// Lowercase hex of `value`, zero-padded to `digits`.
std::string to_hex(std::uint64_t value, int digits);

/// Strict hex parse; returns false on any non-hex digit or overflow.
bool parse_hex(std::string_view text, std::uint64_t& out);

/// Shortest round-trip decimal representation; identical bytes on every
/// conforming platform.
std::string format_double(double value);

std::string sha256_hex(std::string_view data);

}  // namespace kwstega
