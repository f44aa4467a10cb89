#ifndef FGPROP_SPAN_H_
#define FGPROP_SPAN_H_

#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fgprop/technique.h"

namespace fgprop {

// Number of character positions shared by [a_begin, a_end) and
// [b_begin, b_end).
inline constexpr std::size_t shared_characters(std::size_t a_begin,
                                               std::size_t a_end,
                                               std::size_t b_begin,
                                               std::size_t b_end) {
  const std::size_t lo = a_begin > b_begin ? a_begin : b_begin;
  const std::size_t hi = a_end < b_end ? a_end : b_end;
  return hi > lo ? hi - lo : 0;
}

// A labeled half-open character interval [begin, end) of a document.
// Offsets count Unicode scalar values, not bytes.
class Fragment {
 public:
  // Throws std::invalid_argument unless begin < end.
  Fragment(std::size_t begin, std::size_t end, Technique technique);

  std::size_t begin() const { return begin_; }
  std::size_t end() const { return end_; }
  std::size_t length() const { return end_ - begin_; }
  Technique technique() const { return technique_; }

  // Canonical order: begin, end, technique.
  friend auto operator<=>(const Fragment &, const Fragment &) = default;

 private:
  std::size_t begin_;
  std::size_t end_;
  Technique technique_;
};

inline std::size_t shared_characters(const Fragment &a, const Fragment &b) {
  return shared_characters(a.begin(), a.end(), b.begin(), b.end());
}

struct SentenceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t index = 0;

  std::size_t length() const { return end - begin; }
  friend bool operator==(const SentenceSpan &, const SentenceSpan &) = default;
};

// Sentences are maximal runs of characters other than '\n' and '\r'. Blank
// lines produce no sentence.
std::vector<SentenceSpan> split_sentences(std::u32string_view text);

inline constexpr bool is_line_break(char32_t c) {
  return c == U'\n' || c == U'\r';
}

// An article. Immutable after construction.
class Document {
 public:
  Document(std::string id, std::u32string text);

  const std::string &id() const { return id_; }
  const std::u32string &text() const { return text_; }
  std::size_t length() const { return text_.size(); }
  std::span<const SentenceSpan> sentences() const { return sentences_; }

  // Throws std::out_of_range for an invalid index.
  const SentenceSpan &sentence(std::size_t index) const;

  // UTF-8 text of [begin, end).
  std::string slice(std::size_t begin, std::size_t end) const;

 private:
  std::string id_;
  std::u32string text_;
  std::vector<SentenceSpan> sentences_;
};

// All fragments of one document (gold or predicted). Overlaps and
// duplicates are kept: this is a multiset.
struct AnnotationSet {
  std::string doc_id;
  std::vector<Fragment> fragments;

  std::size_t size() const { return fragments.size(); }
  bool empty() const { return fragments.empty(); }

  // Throws fgprop::Error naming the document and offsets of the first
  // fragment extending past the document end, or on a doc_id mismatch.
  void check_against(const Document &doc) const;

  // Sorts fragments in canonical order.
  void sort();
};

// Annotations of many documents keyed by doc_id.
using Annotations = std::map<std::string, AnnotationSet>;

std::size_t total_fragments(const Annotations &annotations);

// Fragments overlapping sentence `sentence_index` by at least one character,
// offsets unchanged. Throws std::out_of_range for an invalid index and
// fgprop::Error when the annotation set belongs to another document.
std::vector<Fragment> fragments_in_sentence(const Document &doc,
                                            const AnnotationSet &annotations,
                                            std::size_t sentence_index);

// True iff at least one gold fragment overlaps the sentence.
bool sentence_label(const Document &doc, const AnnotationSet &gold,
                    std::size_t sentence_index);

// sentence_label() for every sentence of the document.
std::vector<bool> sentence_labels(const Document &doc,
                                  const AnnotationSet &gold);

}  // namespace fgprop

#endif  // FGPROP_SPAN_H_
