#ifndef FGPROP_EMBEDDING_FILE_H_
#define FGPROP_EMBEDDING_FILE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fgprop/corpus.h"
#include "fgprop/tokenizer.h"

namespace fgprop {

// Binary exchange format for precomputed contextual embeddings. All integers
// and floats are little-endian.
//
//   magic            8 bytes  "FGPEMB\0\1"
//   version          u32      (1)
//   encoder_len      u32, then encoder_len bytes of UTF-8 encoder name
//   dimension        u32
//   sentence_count   u64
//   max_len          u32      token limit used at export
//   truncated        u64      sentences truncated to max_len
//   skipped          u64      sentences skipped (offset misalignment)
//   sentence_count records:
//     doc_id_len     u32, then doc_id_len bytes of UTF-8
//     sentence_index u32
//     token_count    u32
//     token_count x (begin u32, end u32)   document character offsets
//     (token_count + 1) x dimension x f32  row 0 is the sentence vector
//
// The file ends exactly after the last record.
struct EmbeddingRecord {
  std::string doc_id;
  std::uint32_t sentence_index = 0;
  std::vector<Token> tokens;
  // (tokens.size() + 1) * dimension values, row-major.
  std::vector<float> vectors;
};

struct EmbeddingFile {
  static constexpr std::uint32_t kVersion = 1;

  std::uint32_t version = kVersion;
  std::string encoder;
  std::uint32_t dimension = 0;
  std::uint32_t max_len = 210;
  std::uint64_t truncated = 0;
  std::uint64_t skipped = 0;
  std::vector<EmbeddingRecord> records;
};

// Throws FormatError on a bad magic, unsupported version, zero dimension,
// count/payload mismatch, truncated payload, trailing bytes, non-finite
// values or an inverted token span.
EmbeddingFile read_embedding_file(const std::filesystem::path &path);

void write_embedding_file(const std::filesystem::path &path,
                          const EmbeddingFile &file);

// Checks every record against the corpus: known document and sentence,
// token offsets ordered, non-overlapping and inside the sentence span.
// Returns one message per violation (empty when clean).
std::vector<std::string> verify_embedding_file(const EmbeddingFile &file,
                                               const Corpus &corpus);

}  // namespace fgprop

#endif  // FGPROP_EMBEDDING_FILE_H_
