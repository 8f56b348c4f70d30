#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nerkit::text {

/// Decodes UTF-8 into code points. Invalid bytes decode to themselves
/// (as Latin-1) so that arbitrary input never throws.
std::vector<char32_t> decode_utf8(std::string_view s);
std::string encode_utf8(const std::vector<char32_t>& cps);
void append_utf8(std::string& out, char32_t cp);

bool is_upper(char32_t cp);
bool is_lower(char32_t cp);
bool is_digit(char32_t cp);
char32_t to_lower(char32_t cp);
char32_t to_upper(char32_t cp);

/// Simple (one-to-one) case folding for ASCII, Latin-1, Latin Extended-A,
/// Greek and Cyrillic. Other scripts pass through unchanged.
std::string fold_case(std::string_view s);
std::string upper_case(std::string_view s);

std::size_t codepoint_length(std::string_view s);

/// First / last n code points (or fewer if the string is shorter).
std::string utf8_prefix(std::string_view s, std::size_t n);
std::string utf8_suffix(std::string_view s, std::size_t n);

bool has_whitespace(std::string_view s);

/// Replaces ASCII whitespace with '_' so the result can be used inside a
/// tab- or space-delimited feature name.
std::string sanitize_name(std::string_view s);

std::vector<std::string> split(std::string_view s, char delim);
std::vector<std::string> split_whitespace(std::string_view s);
std::string_view trim(std::string_view s);

/// Shortest round-trip decimal rendering (17 significant digits).
std::string format_real(double v);

}  // namespace nerkit::text
