// Writes the synthetic corpus (and optionally a matching embedding file).
#include <iostream>

#include <CLI11.hpp>

#include "fgprop/embedding.h"
#include "fgprop/embedding_file.h"
#include "fgprop/synthetic.h"

namespace {

fgprop::EmbeddingFile toy_embedding_file(const fgprop::Corpus &corpus,
                                         std::size_t dim, std::uint64_t seed,
                                         std::uint32_t max_len) {
  const fgprop::ToyEmbedding toy(dim, seed);
  fgprop::EmbeddingFile file;
  file.encoder = "toy-hash";
  file.dimension = static_cast<std::uint32_t>(dim);
  file.max_len = max_len;
  for (const auto &[id, doc] : corpus.documents) {
    for (const auto &s : doc.sentences()) {
      auto tokens = toy.tokenize(doc, s);
      if (tokens.size() > max_len) {
        ++file.truncated;
        tokens.resize(max_len);
      }
      fgprop::EmbeddingRecord rec;
      rec.doc_id = id;
      rec.sentence_index = static_cast<std::uint32_t>(s.index);
      rec.tokens = tokens;
      const Eigen::MatrixXd m = toy.lookup(doc, s, tokens);
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          rec.vectors.push_back(static_cast<float>(m(r, c)));
        }
      }
      file.records.push_back(std::move(rec));
    }
  }
  return file;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Generate the synthetic separable corpus", "fgprop-synth"};
  std::string out;
  std::string embeddings;
  fgprop::SyntheticOptions opts;
  std::size_t dim = 32;
  std::uint64_t embedding_seed = 0;
  app.add_option("--out", out, "Corpus root to write")->required();
  app.add_option("--articles", opts.articles, "Number of articles");
  app.add_option("--seed", opts.seed, "Generator seed");
  app.add_option("--positive-rate", opts.positive_rate,
                 "Share of positive sentences in propagandistic articles");
  app.add_option("--embeddings", embeddings, "Also write a toy embedding file");
  app.add_option("--dim", dim, "Embedding dimension");
  app.add_option("--embedding-seed", embedding_seed, "Toy embedding seed");
  CLI11_PARSE(app, argc, argv);

  try {
    const fgprop::Corpus corpus = fgprop::make_synthetic_corpus(opts);
    fgprop::write_corpus(out, corpus);
    if (!embeddings.empty()) {
      fgprop::write_embedding_file(embeddings,
                                   toy_embedding_file(corpus, dim, embedding_seed, 210));
    }
    std::cout << corpus.documents.size() << " articles, "
              << fgprop::total_fragments(corpus.gold) << " fragments written to "
              << out << '\n';
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
