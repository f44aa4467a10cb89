#ifndef FGPROP_UTF8_H_
#define FGPROP_UTF8_H_

#include <string>
#include <string_view>

namespace fgprop {

// Decodes UTF-8 into Unicode scalar values. Throws fgprop::Error on
// malformed input (overlong forms, surrogates, truncated sequences).
std::u32string utf8_decode(std::string_view bytes);

std::string utf8_encode(std::u32string_view text);

}  // namespace fgprop

#endif  // FGPROP_UTF8_H_
