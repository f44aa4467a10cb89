#include "fgprop/embedding.h"

#include <cmath>

#include "fgprop/error.h"

namespace fgprop {
namespace {

std::uint64_t splitmix64(std::uint64_t &state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::u32string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char32_t c : s) {
    for (int shift = 0; shift < 32; shift += 8) {
      h ^= (static_cast<std::uint64_t>(c) >> shift) & 0xFF;
      h *= 0x100000001B3ull;
    }
  }
  return h;
}

}  // namespace

void check_embedding_matrix(const Eigen::MatrixXd &m, std::size_t tokens,
                            std::size_t dimension) {
  if (static_cast<std::size_t>(m.rows()) != tokens + 1) {
    throw Error("embedding matrix has " + std::to_string(m.rows()) +
                " rows; expected " + std::to_string(tokens + 1));
  }
  if (static_cast<std::size_t>(m.cols()) != dimension) {
    throw Error("embedding dimension " + std::to_string(m.cols()) +
                " does not match expected " + std::to_string(dimension));
  }
  if (!m.allFinite()) throw Error("embedding matrix has non-finite values");
}

ToyEmbedding::ToyEmbedding(std::size_t dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
  if (dimension == 0) throw Error("embedding dimension must be positive");
}

Eigen::VectorXd ToyEmbedding::vector_for(std::u32string_view token) const {
  std::uint64_t state = fnv1a(token) ^ (seed_ * 0xD6E8FEB86659FD93ull);
  Eigen::VectorXd v(static_cast<Eigen::Index>(dimension_));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    // Uniform in [-1, 1) from the top 53 bits.
    double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    v[i] = 2.0 * u - 1.0;
  }
  double norm = v.norm();
  if (norm > 0) v /= norm;
  return v;
}

std::vector<Token> ToyEmbedding::tokenize(const Document &doc,
                                          const SentenceSpan &sentence) const {
  return fgprop::tokenize(
      std::u32string_view(doc.text()).substr(sentence.begin, sentence.length()),
      sentence.begin);
}

Eigen::MatrixXd ToyEmbedding::lookup(const Document &doc,
                                     const SentenceSpan &sentence,
                                     std::span<const Token> tokens) const {
  (void)sentence;
  const auto d = static_cast<Eigen::Index>(dimension_);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(tokens.size()) + 1, d);
  std::u32string_view text = doc.text();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i) + 1) =
        vector_for(text.substr(tokens[i].begin, tokens[i].length()))
            .transpose();
  }
  if (!tokens.empty()) {
    m.row(0) = m.bottomRows(m.rows() - 1).colwise().mean();
  }
  return m;
}

nlohmann::json ToyEmbedding::describe() const {
  return {{"kind", "toy"}, {"dimension", dimension_}, {"seed", seed_}};
}

FileEmbedding::FileEmbedding(EmbeddingFile file, std::string path)
    : file_(std::move(file)), path_(std::move(path)) {
  for (std::size_t i = 0; i < file_.records.size(); ++i) {
    const auto &rec = file_.records[i];
    auto [it, inserted] =
        index_.emplace(std::make_pair(rec.doc_id, rec.sentence_index), i);
    if (!inserted) {
      throw Error("embedding file " + path_ + " has duplicate record " +
                  rec.doc_id + "/" + std::to_string(rec.sentence_index));
    }
  }
}

const EmbeddingRecord *FileEmbedding::find(const Document &doc,
                                           const SentenceSpan &sentence) const {
  auto it = index_.find({doc.id(), sentence.index});
  return it == index_.end() ? nullptr : &file_.records[it->second];
}

std::vector<Token> FileEmbedding::tokenize(const Document &doc,
                                           const SentenceSpan &sentence) const {
  const EmbeddingRecord *rec = find(doc, sentence);
  if (!rec) return {};
  for (const auto &t : rec->tokens) {
    if (t.begin < sentence.begin || t.end > sentence.end) {
      throw Error("embedding file " + path_ + ": token [" +
                  std::to_string(t.begin) + "," + std::to_string(t.end) +
                  ") lies outside sentence " + doc.id() + "/" +
                  std::to_string(sentence.index));
    }
  }
  return rec->tokens;
}

Eigen::MatrixXd FileEmbedding::lookup(const Document &doc,
                                      const SentenceSpan &sentence,
                                      std::span<const Token> tokens) const {
  const EmbeddingRecord *rec = find(doc, sentence);
  if (!rec || tokens.size() > rec->tokens.size()) {
    throw Error("embedding file " + path_ + " has no vectors for " + doc.id() +
                "/" + std::to_string(sentence.index));
  }
  const auto d = static_cast<Eigen::Index>(file_.dimension);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(tokens.size()) + 1, d);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      m(r, c) = rec->vectors[static_cast<std::size_t>(r * d + c)];
    }
  }
  return m;
}

nlohmann::json FileEmbedding::describe() const {
  return {{"kind", "file"},
          {"path", path_},
          {"dimension", file_.dimension},
          {"encoder", file_.encoder}};
}

std::unique_ptr<EmbeddingProvider> make_embedding(const nlohmann::json &desc) {
  const std::string kind = desc.value("kind", "");
  if (kind == "toy") {
    return std::make_unique<ToyEmbedding>(desc.at("dimension").get<std::size_t>(),
                                          desc.at("seed").get<std::uint64_t>());
  }
  if (kind == "file") {
    std::string path = desc.at("path").get<std::string>();
    return std::make_unique<FileEmbedding>(read_embedding_file(path), path);
  }
  throw Error("unknown embedding kind '" + kind + "'");
}

}  // namespace fgprop
