#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lrmt::utf8 {

/// Decodes `text` into code points. Throws DecodeError with the offset of the
/// first ill-formed sequence (overlongs, surrogates and truncation included).
std::vector<char32_t> decode(std::string_view text);

/// Throws DecodeError on the first ill-formed sequence.
void validate(std::string_view text);

std::string encode(char32_t cp);

// ASCII whitespace only; sentence text is trimmed the same way on every path.
std::string_view trim(std::string_view s);

/// Splits on runs of ASCII whitespace.
std::vector<std::string> split_whitespace(std::string_view s);

std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ");

}  // namespace lrmt::utf8
