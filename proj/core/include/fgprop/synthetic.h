#ifndef FGPROP_SYNTHETIC_H_
#define FGPROP_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "fgprop/corpus.h"

namespace fgprop {

// Generated corpus with a token-separable signal: each technique owns two
// marker words that never occur elsewhere, and every gold fragment covers
// exactly one marker phrase. Deterministic for a given seed on every
// platform.
struct SyntheticOptions {
  std::size_t articles = 30;
  std::size_t min_sentences = 6;
  std::size_t max_sentences = 10;
  double positive_rate = 0.35;         // propagandistic-source articles
  double second_fragment_rate = 0.2;   // positive sentences with two phrases
  double blank_line_rate = 0.1;
  double train_fraction = 0.6;
  double dev_fraction = 0.2;
  std::uint64_t seed = 7;
};

Corpus make_synthetic_corpus(const SyntheticOptions &options);

// Marker phrase of a technique, e.g. "outrageous disgraceful".
std::string_view synthetic_phrase(Technique t);

}  // namespace fgprop

#endif  // FGPROP_SYNTHETIC_H_
