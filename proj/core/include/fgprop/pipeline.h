#ifndef FGPROP_PIPELINE_H_
#define FGPROP_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fgprop/config.h"
#include "fgprop/corpus.h"
#include "fgprop/embedding.h"
#include "fgprop/metric.h"
#include "fgprop/model.h"
#include "fgprop/trainer.h"

namespace fgprop {

// Tokens of one document in reading order, each tagged with its sentence.
struct TokenAlignment {
  std::string doc_id;
  std::vector<Token> tokens;
  std::vector<std::size_t> sentence_of;

  std::size_t size() const { return tokens.size(); }
};

// Tokenizes every sentence with `embedding`, keeping at most max_tokens per
// sentence. `truncated` (optional) receives the number of dropped tokens.
TokenAlignment align_document(const Document &doc,
                              const EmbeddingProvider &embedding,
                              std::size_t max_tokens,
                              std::size_t *truncated = nullptr);

// Class per token: token_class() of an overlapping gold fragment, or
// kNoneClass. When several fragments overlap a token, the earliest start
// wins, then the longer fragment, then the lower technique index.
std::vector<int> project_gold_to_tokens(const AnnotationSet &gold,
                                        const TokenAlignment &alignment);

// Maximal runs of tokens with the same technique class inside one sentence
// become one fragment from the first token's begin to the last token's end.
// Throws fgprop::Error when the class count differs from the token count or
// a class is out of range.
AnnotationSet decode_fragments(std::span<const int> classes,
                               const TokenAlignment &alignment);

// A sentence ready for the model.
struct SentenceExample {
  std::string doc_id;
  std::size_t sentence = 0;
  std::vector<Token> tokens;  // after truncation
  Example example;
};

struct PreparedSplit {
  std::vector<std::string> ids;
  std::vector<SentenceExample> examples;  // sentences without tokens omitted
  std::size_t sentences = 0;              // including omitted ones
  std::size_t truncated_tokens = 0;
};

PreparedSplit prepare_split(const Corpus &corpus,
                            std::span<const std::string> ids,
                            const EmbeddingProvider &embedding,
                            std::size_t max_tokens);

struct Predictions {
  Annotations fragments;     // an entry for every document
  SentenceLabelMap sentences;  // every sentence of every document
};

// Runs the model on every prepared sentence. Sentences without tokens are
// predicted negative.
Predictions predict(const MgnModel &model, const PreparedSplit &split,
                    const Corpus &corpus);

struct TaskScores {
  ScoreReport flc_full;
  ScoreReport flc_spans;
  ScoreReport slc;
};

// Scores predictions against the gold of `ids`.
TaskScores evaluate(const Predictions &predictions, const Corpus &corpus,
                    std::span<const std::string> ids);

// Gold sentence labels of `ids` in document then sentence order.
std::vector<bool> gold_sentence_labels(const Corpus &corpus,
                                       std::span<const std::string> ids);

// SLC scores of predicting every sentence positive.
ScoreReport all_propaganda_baseline(const Corpus &corpus,
                                    std::span<const std::string> ids);

// N_negative / N_positive over the examples; 1 without positives.
double positive_class_weight(std::span<const SentenceExample> examples);

std::unique_ptr<EmbeddingProvider> make_embedding(const ExperimentConfig &config);

struct SeedRun {
  std::uint64_t seed = 0;
  TrainResult training;
  TaskScores dev;
  TaskScores test;
  Predictions test_predictions;
};

struct ExperimentResult {
  std::vector<SeedRun> runs;
  TaskScores mean;  // arithmetic mean of P, R and F1 over seeds
  double positive_weight = 1.0;
  double alpha = 0.0;
};

TaskScores mean_scores(std::span<const TaskScores> scores);

// Trains one model per seed on train, early-stops on the dev F1 of the
// configured task, and scores the test split. With a run directory, writes
//   config.cfg, scores.json
//   seed-<s>/model.ckpt, predictions.tsv, predictions.slc.tsv,
//   train_log.tsv, scores.json
// Throws fgprop::Error when the corpus has no split or no training examples.
ExperimentResult run_experiment(const ExperimentConfig &config,
                                const Corpus &corpus,
                                const std::optional<std::filesystem::path> &run_dir = {});

nlohmann::json to_json(const TaskScores &scores);

// Human-readable table: one row per seed and a mean row.
std::string format_experiment_table(const nlohmann::json &scores);

}  // namespace fgprop

#endif  // FGPROP_PIPELINE_H_
