#ifndef FGPROP_TOKENIZER_H_
#define FGPROP_TOKENIZER_H_

#include <cstddef>
#include <string_view>
#include <vector>

namespace fgprop {

struct Token {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - begin; }
  friend bool operator==(const Token &, const Token &) = default;
};

// Offset-preserving word tokenizer: maximal runs of word characters (letters,
// digits, apostrophes and anything outside ASCII that is not whitespace or
// common punctuation) form one token, every other non-space character is a
// token by itself. Offsets are relative to `text` plus `offset`.
std::vector<Token> tokenize(std::u32string_view text, std::size_t offset = 0);

}  // namespace fgprop

#endif  // FGPROP_TOKENIZER_H_
