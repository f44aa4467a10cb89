#ifndef FGPROP_CORPUS_H_
#define FGPROP_CORPUS_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fgprop/span.h"

namespace fgprop {

enum class Split { kTrain, kDev, kTest };

inline constexpr Split kAllSplits[] = {Split::kTrain, Split::kDev,
                                       Split::kTest};

std::string_view split_name(Split split);
std::optional<Split> parse_split(std::string_view name);

enum class SourceKind { kPropagandistic, kNonPropagandistic };

// Documents, gold annotations and split assignment. Every loaded document
// has a (possibly empty) gold entry.
struct Corpus {
  std::map<std::string, Document> documents;
  Annotations gold;
  std::map<std::string, Split> split;
  // Present only when a source-label sidecar was supplied.
  std::map<std::string, SourceKind> sources;

  bool empty() const { return documents.empty(); }
  bool has_split() const { return !split.empty(); }

  // Document ids assigned to `s`, in id order.
  std::vector<std::string> ids_in(Split s) const;

  const Document &document(const std::string &id) const;
  const AnnotationSet &gold_for(const std::string &id) const;
};

// On-disk layout of a corpus. `from_root` expects
//   root/articles/       article<ID>.txt (or <ID>.txt)
//   root/labels/         annotation TSV files (*.labels, *.tsv)
//   root/split/          train.txt dev.txt test.txt (optional)
//   root/sources.tsv     doc_id <TAB> prop|nonprop (optional)
struct CorpusPaths {
  std::filesystem::path article_dir;
  std::filesystem::path annotation_dir;
  std::optional<std::filesystem::path> split_dir;
  std::optional<std::filesystem::path> sources_file;

  static CorpusPaths from_root(const std::filesystem::path &root);
};

// Loads and validates a corpus. Throws FormatError (file + line) on malformed
// rows, unknown technique identifiers (listing the valid ones) and unknown
// documents, and fgprop::Error on out-of-bounds offsets or a document listed
// in more than one split. Split files may name documents that are not
// loaded; verify_split() reports those.
Corpus load_corpus(const CorpusPaths &paths);

// doc_id for an article file: the stem, minus a leading "article".
std::string doc_id_from_article_path(const std::filesystem::path &path);

// Reads annotation rows <doc_id, technique, begin, end> from a file or from
// every *.labels / *.tsv file of a directory. No document validation.
Annotations read_annotations(const std::filesystem::path &path);

// Parses annotation rows from a stream; `source` names it in errors.
void read_annotation_rows(std::istream &in, const std::string &source,
                          Annotations &out);

// Writes rows in canonical order (doc_id, begin, end, technique).
void write_annotations(std::ostream &out, const Annotations &annotations);

// One <doc_id>.labels file per document with at least one fragment.
void write_annotation_dir(const std::filesystem::path &dir,
                          const Annotations &annotations);

// Writes a corpus in the from_root() layout (articles, labels, split,
// sources). Used by fixtures and the synthetic generator.
void write_corpus(const std::filesystem::path &root, const Corpus &corpus);

// Sentence-level labels: doc_id <TAB> sentence_index <TAB>
// propaganda|non-propaganda. Key is (doc_id, sentence_index).
using SentenceLabelMap = std::map<std::pair<std::string, std::size_t>, bool>;

SentenceLabelMap read_sentence_labels(const std::filesystem::path &path);
void write_sentence_labels(std::ostream &out, const SentenceLabelMap &labels);

std::string read_file(const std::filesystem::path &path);

}  // namespace fgprop

#endif  // FGPROP_CORPUS_H_
