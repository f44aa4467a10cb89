#ifndef FGPROP_STATS_H_
#define FGPROP_STATS_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fgprop/corpus.h"

namespace fgprop {

struct TechniqueStats {
  Technique technique;
  std::size_t count = 0;
  // Fragment length in characters; population standard deviation.
  double mean_length = 0.0;
  double sd_length = 0.0;
};

// Per-article averages for a group of articles.
struct ArticleGroupStats {
  std::size_t articles = 0;
  double avg_lines = 0.0;           // all lines, blank included
  double avg_nonblank_lines = 0.0;  // == sentences
  double avg_words = 0.0;           // whitespace-separated
  double avg_chars = 0.0;
};

struct SplitCounts {
  std::size_t articles = 0;
  std::size_t sentences = 0;
  std::size_t lines = 0;  // blank lines included
  std::size_t positive_sentences = 0;
};

struct CorpusStats {
  ArticleGroupStats all;
  std::optional<ArticleGroupStats> propagandistic;
  std::optional<ArticleGroupStats> non_propagandistic;

  // Sorted by count descending, then technique index.
  std::vector<TechniqueStats> techniques;
  std::size_t total_instances = 0;
  double mean_length = 0.0;
  double sd_length = 0.0;

  std::size_t sentences = 0;
  std::size_t lines = 0;
  std::size_t sentences_with_technique = 0;
  // sentences_with_technique / sentences.
  double fraction_with_technique = 0.0;
  // total_instances / sentences.
  double instances_per_sentence = 0.0;

  // Present only for splits with at least one document assigned.
  std::map<Split, SplitCounts> splits;
};

// Throws fgprop::Error on an empty corpus.
CorpusStats compute_stats(const Corpus &corpus);

// Number of lines of `text`, counting blank ones. A trailing line break does
// not open a new line.
std::size_t count_lines(std::u32string_view text);

std::size_t count_words(std::u32string_view text);

nlohmann::json to_json(const CorpusStats &stats);
void write_tsv(std::ostream &out, const CorpusStats &stats);

// Comparison of computed statistics against an expected-values document:
//   { "articles": N, "total_instances": N,
//     "techniques": { "<id>": {"count": N, "mean": x, "sd": x}, ... },
//     "all": {"mean": x, "sd": x} }
// Every key is optional. Counts compare exactly, lengths within
// `length_tolerance`.
struct ExpectationReport {
  std::vector<std::string> mismatches;
  std::size_t checks = 0;
  bool ok() const { return mismatches.empty(); }
};

ExpectationReport check_expected(const CorpusStats &stats,
                                 const nlohmann::json &expected,
                                 double length_tolerance = 0.5);

struct SplitReport {
  std::map<Split, SplitCounts> counts;
  std::vector<std::string> mismatches;
  bool ok() const { return mismatches.empty(); }
};

// Per-split article and sentence counts. `expected` (optional) has the form
//   { "train": {"articles": N, "sentences": N}, "dev": {...}, ... }.
// Throws fgprop::Error when the corpus has no split or the split names a
// document that is not in the corpus.
SplitReport verify_split(const Corpus &corpus,
                         const nlohmann::json *expected = nullptr);

nlohmann::json to_json(const SplitReport &report);

}  // namespace fgprop

#endif  // FGPROP_STATS_H_
