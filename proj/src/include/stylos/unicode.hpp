#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace stylos::uni {

// Normalization used across the whole pipeline: full lowercase (root locale,
// so final sigma survives as produced by standard lowercasing), canonical
// decomposition, removal of all combining marks (Mn/Mc/Me), canonical
// recomposition, then whitespace runs collapsed to single ASCII spaces and
// trimmed. Total: invalid UTF-8 bytes become U+FFFD.
std::string normalize_text(std::string_view utf8);

bool is_combining_mark(char32_t cp);
bool is_whitespace(char32_t cp);

// Invalid sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view utf8);
std::string encode_utf8(std::u32string_view cps);
void append_utf8(std::string& out, char32_t cp);

size_t codepoint_count(std::string_view utf8);

// Maximal non-whitespace runs (ASCII whitespace suffices for normalized text).
size_t word_count(std::string_view text);
std::vector<std::string_view> split_words(std::string_view text);

}  // namespace stylos::uni
