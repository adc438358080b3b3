#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cea::text {

// Decodes the UTF-8 codepoint starting at byte `pos`, writing its value to
// `cp` and returning the number of bytes consumed (>= 1). Invalid sequences
// are treated as a single Latin-1 byte so that malformed input never stalls
// the scanner.
std::size_t decode_utf8(std::string_view s, std::size_t pos, char32_t& cp);

// Codepoint count of a UTF-8 string.
std::size_t codepoint_length(std::string_view s);

// UTF-8 string split into codepoint substrings (used for char n-grams).
std::vector<std::string> codepoints(std::string_view s);

// ASCII-only lowercasing; non-ASCII bytes pass through untouched.
std::string lower(std::string_view s);

bool is_ascii_punct(char32_t cp);

// True for pictographic/emoji codepoints (coarse block test).
bool is_emoji_cp(char32_t cp);

// True for western text emoticons (":(", ":-)", ";P", "D:", "<3", ...).
bool is_emoticon(std::string_view s);

// Emoticon or emoji-only token.
bool is_emoji_token(std::string_view s);

// Token made solely of ASCII punctuation (",", ".", "...", "!?", ...).
// Emoticons are not punctuation-only even though they use punctuation chars.
bool is_punct_only(std::string_view s);

std::vector<std::string> split_ws(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);

}  // namespace cea::text
