#include "fgprop/span.h"

#include <algorithm>
#include <stdexcept>

#include "fgprop/error.h"
#include "fgprop/utf8.h"

namespace fgprop {

Fragment::Fragment(std::size_t begin, std::size_t end, Technique technique)
    : begin_(begin), end_(end), technique_(technique) {
  if (begin >= end) {
    throw std::invalid_argument("fragment [" + std::to_string(begin) + "," +
                                std::to_string(end) +
                                ") is empty or reversed");
  }
}

std::vector<SentenceSpan> split_sentences(std::u32string_view text) {
  std::vector<SentenceSpan> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && is_line_break(text[i])) ++i;
    if (i == n) break;
    std::size_t j = i;
    while (j < n && !is_line_break(text[j])) ++j;
    out.push_back({i, j, out.size()});
    i = j;
  }
  return out;
}

Document::Document(std::string id, std::u32string text)
    : id_(std::move(id)),
      text_(std::move(text)),
      sentences_(split_sentences(text_)) {}

const SentenceSpan &Document::sentence(std::size_t index) const {
  if (index >= sentences_.size()) {
    throw std::out_of_range("document " + id_ + " has " +
                            std::to_string(sentences_.size()) +
                            " sentences; index " + std::to_string(index) +
                            " is out of range");
  }
  return sentences_[index];
}

std::string Document::slice(std::size_t begin, std::size_t end) const {
  end = std::min(end, text_.size());
  if (begin >= end) return {};
  return utf8_encode(std::u32string_view(text_).substr(begin, end - begin));
}

void AnnotationSet::check_against(const Document &doc) const {
  if (doc_id != doc.id()) {
    throw Error("annotations for document " + doc_id +
                " paired with document " + doc.id());
  }
  for (const auto &f : fragments) {
    if (f.end() > doc.length()) {
      throw Error("document " + doc_id + ": fragment [" +
                  std::to_string(f.begin()) + "," + std::to_string(f.end()) +
                  ") exceeds document length " + std::to_string(doc.length()));
    }
  }
}

void AnnotationSet::sort() { std::sort(fragments.begin(), fragments.end()); }

std::size_t total_fragments(const Annotations &annotations) {
  std::size_t n = 0;
  for (const auto &[id, set] : annotations) n += set.size();
  return n;
}

std::vector<Fragment> fragments_in_sentence(const Document &doc,
                                            const AnnotationSet &annotations,
                                            std::size_t sentence_index) {
  if (annotations.doc_id != doc.id()) {
    throw Error("annotations for document " + annotations.doc_id +
                " paired with document " + doc.id());
  }
  const SentenceSpan &s = doc.sentence(sentence_index);
  std::vector<Fragment> out;
  for (const auto &f : annotations.fragments) {
    if (shared_characters(f.begin(), f.end(), s.begin, s.end) > 0) {
      out.push_back(f);
    }
  }
  return out;
}

bool sentence_label(const Document &doc, const AnnotationSet &gold,
                    std::size_t sentence_index) {
  return !fragments_in_sentence(doc, gold, sentence_index).empty();
}

std::vector<bool> sentence_labels(const Document &doc,
                                  const AnnotationSet &gold) {
  if (gold.doc_id != doc.id()) {
    throw Error("annotations for document " + gold.doc_id +
                " paired with document " + doc.id());
  }
  std::vector<bool> out(doc.sentences().size(), false);
  for (const auto &f : gold.fragments) {
    for (const auto &s : doc.sentences()) {
      if (s.begin >= f.end()) break;
      if (shared_characters(f.begin(), f.end(), s.begin, s.end) > 0) {
        out[s.index] = true;
      }
    }
  }
  return out;
}

}  // namespace fgprop
