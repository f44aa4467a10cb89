#include "fgprop/tokenizer.h"

namespace fgprop {
namespace {

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' ||
         c == U'\v' || c == 0x00A0 || c == 0x2000 || c == 0x2002 ||
         c == 0x2003 || c == 0x2009 || c == 0x200A || c == 0x200B ||
         c == 0x3000;
}

bool is_word_char(char32_t c) {
  if (c < 0x80) {
    return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') ||
           (c >= U'0' && c <= U'9') || c == U'\'' || c == U'_';
  }
  // General punctuation block, curly quotes, dashes, ellipsis.
  if (c >= 0x2010 && c <= 0x205E) return false;
  if (c == 0x00AB || c == 0x00BB || c == 0x00BF || c == 0x00A1) return false;
  return !is_space(c);
}

}  // namespace

std::vector<Token> tokenize(std::u32string_view text, std::size_t offset) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (is_space(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (is_word_char(text[i])) {
      while (j < n && is_word_char(text[j])) ++j;
    }
    out.push_back({offset + i, offset + j});
    i = j;
  }
  return out;
}

}  // namespace fgprop
