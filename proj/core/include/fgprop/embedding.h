#ifndef FGPROP_EMBEDDING_H_
#define FGPROP_EMBEDDING_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fgprop/embedding_file.h"
#include "fgprop/span.h"
#include "fgprop/tokenizer.h"

namespace fgprop {

// Source of per-token vectors. lookup() returns (tokens + 1) rows of
// dimension() columns; row 0 represents the whole sentence.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dimension() const = 0;

  // Tokenization this provider embeds. Offsets are document offsets.
  virtual std::vector<Token> tokenize(const Document &doc,
                                      const SentenceSpan &sentence) const = 0;

  // `tokens` is a prefix of tokenize(doc, sentence).
  virtual Eigen::MatrixXd lookup(const Document &doc,
                                 const SentenceSpan &sentence,
                                 std::span<const Token> tokens) const = 0;

  // Enough to reconstruct the provider (stored in checkpoints).
  virtual nlohmann::json describe() const = 0;
};

// Throws fgprop::Error unless the matrix has tokens + 1 rows, `dimension`
// columns and only finite values.
void check_embedding_matrix(const Eigen::MatrixXd &m, std::size_t tokens,
                            std::size_t dimension);

// Context-free vectors derived from a hash of each token string: unit-norm,
// deterministic for a given seed. The sentence vector is the mean of the
// token vectors.
class ToyEmbedding : public EmbeddingProvider {
 public:
  ToyEmbedding(std::size_t dimension, std::uint64_t seed);

  std::size_t dimension() const override { return dimension_; }
  std::vector<Token> tokenize(const Document &doc,
                              const SentenceSpan &sentence) const override;
  Eigen::MatrixXd lookup(const Document &doc, const SentenceSpan &sentence,
                         std::span<const Token> tokens) const override;
  nlohmann::json describe() const override;

  Eigen::VectorXd vector_for(std::u32string_view token) const;

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
};

// Vectors precomputed by an external encoder and stored in an embedding
// file. Sentences absent from the file have no tokens.
class FileEmbedding : public EmbeddingProvider {
 public:
  // Throws fgprop::Error on duplicate (doc_id, sentence) records.
  FileEmbedding(EmbeddingFile file, std::string path);

  std::size_t dimension() const override { return file_.dimension; }
  std::vector<Token> tokenize(const Document &doc,
                              const SentenceSpan &sentence) const override;
  Eigen::MatrixXd lookup(const Document &doc, const SentenceSpan &sentence,
                         std::span<const Token> tokens) const override;
  nlohmann::json describe() const override;

  const EmbeddingFile &file() const { return file_; }

 private:
  const EmbeddingRecord *find(const Document &doc,
                              const SentenceSpan &sentence) const;

  EmbeddingFile file_;
  std::string path_;
  std::map<std::pair<std::string, std::size_t>, std::size_t> index_;
};

// Inverse of describe(): {"kind": "toy", "dimension": d, "seed": s} or
// {"kind": "file", "path": p}.
std::unique_ptr<EmbeddingProvider> make_embedding(const nlohmann::json &desc);

}  // namespace fgprop

#endif  // FGPROP_EMBEDDING_H_
