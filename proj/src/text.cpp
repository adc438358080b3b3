#include "cea/text.hpp"

#include <algorithm>
#include <cctype>

namespace cea::text {

std::size_t decode_utf8(std::string_view s, std::size_t pos, char32_t& cp) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    cp = b0;
    return 1;
  }
  std::size_t len = 0;
  char32_t value = 0;
  if ((b0 & 0xe0) == 0xc0) {
    len = 2;
    value = b0 & 0x1f;
  } else if ((b0 & 0xf0) == 0xe0) {
    len = 3;
    value = b0 & 0x0f;
  } else if ((b0 & 0xf8) == 0xf0) {
    len = 4;
    value = b0 & 0x07;
  } else {
    cp = b0;  // stray continuation byte
    return 1;
  }
  if (pos + len > s.size()) {
    cp = b0;
    return 1;
  }
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xc0) != 0x80) {
      cp = b0;
      return 1;
    }
    value = (value << 6) | (b & 0x3f);
  }
  cp = value;
  return len;
}

std::size_t codepoint_length(std::string_view s) {
  std::size_t n = 0, pos = 0;
  char32_t cp;
  while (pos < s.size()) {
    pos += decode_utf8(s, pos, cp);
    ++n;
  }
  return n;
}

std::vector<std::string> codepoints(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  char32_t cp;
  while (pos < s.size()) {
    const std::size_t len = decode_utf8(s, pos, cp);
    out.emplace_back(s.substr(pos, len));
    pos += len;
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

bool is_ascii_punct(char32_t cp) {
  return cp < 0x80 && std::ispunct(static_cast<int>(cp));
}

bool is_emoji_cp(char32_t cp) {
  return (cp >= 0x1f000 && cp <= 0x1faff)   // pictographs, faces, symbols
      || (cp >= 0x2600 && cp <= 0x27bf)     // misc symbols, dingbats
      || (cp >= 0x2b00 && cp <= 0x2bff)     // arrows and stars
      || (cp >= 0x1f1e6 && cp <= 0x1f1ff)   // regional indicators
      || cp == 0x200d || cp == 0xfe0f;      // ZWJ, variation selector
}

namespace {

constexpr std::string_view kEyes = ":;=8xX";
constexpr std::string_view kNose = "-o'^";
constexpr std::string_view kMouth = ")(][}{dDpPoO*@|/\\<>3cC";

bool in(std::string_view set, char c) { return set.find(c) != std::string_view::npos; }

}  // namespace

bool is_emoticon(std::string_view s) {
  if (s.size() < 2) return false;
  if (s == "<3" || s == "</3") return true;
  // forward form: eyes [tear] [nose] mouth+
  if (in(kEyes, s[0])) {
    std::size_t i = 1;
    if (i < s.size() && s[i] == '\'') ++i;
    if (i < s.size() && in(kNose, s[i]) && i + 1 < s.size()) ++i;
    if (i >= s.size()) return false;
    for (std::size_t j = i; j < s.size(); ++j)
      if (!in(kMouth, s[j])) return false;
    return true;
  }
  // reverse form: mouth [nose] eyes, e.g. "):" "D:"
  if (in("()[]{}dDpP/\\", s[0])) {
    std::size_t i = 1;
    if (i < s.size() && in(kNose, s[i]) && i + 1 < s.size()) ++i;
    return i + 1 == s.size() && in(":;=8", s[i]);
  }
  return false;
}

bool is_emoji_token(std::string_view s) {
  if (s.empty()) return false;
  if (is_emoticon(s)) return true;
  std::size_t pos = 0;
  char32_t cp;
  while (pos < s.size()) {
    pos += decode_utf8(s, pos, cp);
    if (!is_emoji_cp(cp)) return false;
  }
  return true;
}

bool is_punct_only(std::string_view s) {
  if (s.empty() || is_emoticon(s)) return false;
  std::size_t pos = 0;
  char32_t cp;
  while (pos < s.size()) {
    pos += decode_utf8(s, pos, cp);
    if (!is_ascii_punct(cp)) return false;
  }
  return true;
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

}  // namespace cea::text
