#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace glyphflow::text {

// Decodes UTF-8 into code points. Malformed sequences throw
// glyphflow::ParameterError.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

std::size_t code_point_count(std::string_view s);

// Strips ASCII whitespace from both ends.
std::string_view trim(std::string_view s);

}  // namespace glyphflow::text
