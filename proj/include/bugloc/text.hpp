#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bugloc {

/// Replaces every malformed UTF-8 sequence with U+FFFD.
std::string decode_lossy_utf8(std::string_view bytes);

/// Number of lines in `text`. A trailing newline does not start a new line;
/// the empty string has zero lines.
std::size_t count_lines(std::string_view text);

/// Splits into lines, each keeping its terminating '\n' (the last line may
/// lack one). Concatenating the result reproduces `text`.
std::vector<std::string_view> split_lines_keep_ends(std::string_view text);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string to_hex(std::uint64_t value);

/// Shell-style glob over '/'-separated paths: `*` and `?` stay within a
/// segment, `**/` spans zero or more directories.
bool glob_match(std::string_view pattern, std::string_view path);

}  // namespace bugloc
