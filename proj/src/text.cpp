#include "nerkit/text.hpp"

#include <cstdio>

namespace nerkit::text {

std::vector<char32_t> decode_utf8(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    char32_t cp = b0;
    if (b0 >= 0xC0 && b0 < 0xE0) {
      extra = 1;
      cp = b0 & 0x1F;
    } else if (b0 >= 0xE0 && b0 < 0xF0) {
      extra = 2;
      cp = b0 & 0x0F;
    } else if (b0 >= 0xF0 && b0 < 0xF8) {
      extra = 3;
      cp = b0 & 0x07;
    }
    bool ok = extra > 0;
    for (std::size_t k = 1; ok && k <= extra; ++k) {
      if (i + k >= s.size()) {
        ok = false;
        break;
      }
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (b & 0x3F);
    }
    if (ok) {
      out.push_back(cp);
      i += extra + 1;
    } else {
      out.push_back(b0);
      ++i;
    }
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode_utf8(const std::vector<char32_t>& cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

namespace {

// Ranges where upper and lower case differ by a constant offset.
struct CaseRange {
  char32_t upper_lo, upper_hi;
  char32_t offset;
};

constexpr CaseRange kOffsetRanges[] = {
    {U'A', U'Z', 32},
    {0x00C0, 0x00D6, 32},   // Latin-1 À..Ö
    {0x00D8, 0x00DE, 32},   // Ø..Þ
    {0x0391, 0x03A1, 32},   // Greek Α..Ρ
    {0x03A3, 0x03AB, 32},   // Σ..Ϋ
    {0x0410, 0x042F, 32},   // Cyrillic А..Я
    {0x0400, 0x040F, 80},   // Ѐ..Џ
};

// Latin Extended-A alternates upper/lower in pairs: even = upper.
bool in_latin_ext_a_pairs(char32_t cp) {
  return (cp >= 0x0100 && cp <= 0x0137) || (cp >= 0x014A && cp <= 0x0177);
}
bool in_latin_ext_a_odd_pairs(char32_t cp) {
  return (cp >= 0x0139 && cp <= 0x0148) || (cp >= 0x0179 && cp <= 0x017E);
}

}  // namespace

char32_t to_lower(char32_t cp) {
  for (const auto& r : kOffsetRanges)
    if (cp >= r.upper_lo && cp <= r.upper_hi) return cp + r.offset;
  if (in_latin_ext_a_pairs(cp)) return (cp % 2 == 0) ? cp + 1 : cp;
  if (in_latin_ext_a_odd_pairs(cp)) return (cp % 2 == 1) ? cp + 1 : cp;
  return cp;
}

char32_t to_upper(char32_t cp) {
  for (const auto& r : kOffsetRanges)
    if (cp >= r.upper_lo + r.offset && cp <= r.upper_hi + r.offset) return cp - r.offset;
  if (in_latin_ext_a_pairs(cp)) return (cp % 2 == 1) ? cp - 1 : cp;
  if (in_latin_ext_a_odd_pairs(cp)) return (cp % 2 == 0) ? cp - 1 : cp;
  return cp;
}

bool is_upper(char32_t cp) { return to_lower(cp) != cp; }

bool is_lower(char32_t cp) {
  // ß and final sigma have no single-code-point uppercase but are lowercase.
  return to_upper(cp) != cp || cp == 0x00DF || cp == 0x03C2;
}

bool is_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }

std::string fold_case(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : decode_utf8(s)) append_utf8(out, to_lower(cp));
  return out;
}

std::string upper_case(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : decode_utf8(s)) append_utf8(out, to_upper(cp));
  return out;
}

std::size_t codepoint_length(std::string_view s) {
  return decode_utf8(s).size();
}

std::string utf8_prefix(std::string_view s, std::size_t n) {
  auto cps = decode_utf8(s);
  if (cps.size() > n) cps.resize(n);
  return encode_utf8(cps);
}

std::string utf8_suffix(std::string_view s, std::size_t n) {
  auto cps = decode_utf8(s);
  if (cps.size() > n) cps.erase(cps.begin(), cps.end() - static_cast<std::ptrdiff_t>(n));
  return encode_utf8(cps);
}

namespace {
bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
}  // namespace

bool has_whitespace(std::string_view s) {
  for (char c : s)
    if (is_space(c)) return true;
  return false;
}

std::string sanitize_name(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (is_space(c)) c = '_';
  return out;
}

std::vector<std::string> split(std::string_view s, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(delim, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace nerkit::text
