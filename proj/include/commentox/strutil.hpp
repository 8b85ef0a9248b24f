#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ctox {

std::string to_lower_ascii(std::string_view s);

// Case-insensitive (ASCII) substring test.
bool contains_ci(std::string_view haystack, std::string_view needle);

// Shortest round-trip decimal rendering (std::to_chars); locale-free and
// deterministic, so emitted tables are byte-stable.
std::string fmt_double(double v);

// Fixed-precision rendering, e.g. fmt_fixed(12.345, 1) == "12.3".
std::string fmt_fixed(double v, int decimals);

// FNV-1a over bytes; used for content fingerprints in provenance blocks.
uint64_t fnv1a64(std::string_view bytes, uint64_t seed = 0xcbf29ce484222325ULL);

// Fingerprint of a file's contents. Throws ParseError if unreadable.
uint64_t fingerprint_file(const std::string& path);

std::string hex64(uint64_t v);

}  // namespace ctox
