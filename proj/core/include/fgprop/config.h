#ifndef FGPROP_CONFIG_H_
#define FGPROP_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fgprop/model.h"

namespace fgprop {

// Which task drives early stopping and the default loss weight.
enum class Task { kFlc, kSlc };
std::string_view task_name(Task t);
std::optional<Task> parse_task(std::string_view name);

enum class EmbeddingKind { kToy, kFile };

// Training configuration. The text form is one `key = value` per line;
// `#` starts a comment. Keys:
//   task architecture gate alpha seeds learning_rate weight_decay
//   warmup_proportion batch_size max_seq_length max_epochs patience
//   embedding embedding_dim embedding_seed embedding_file corpus
//   positive_weight
struct ExperimentConfig {
  Task task = Task::kFlc;
  Architecture architecture = Architecture::kMgn;
  GateActivation gate = GateActivation::kSigmoid;
  std::optional<double> alpha;  // unset: 0.9 for slc, 0.1 for flc
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  double learning_rate = 3e-5;
  double weight_decay = 0.01;
  double warmup_proportion = 0.1;
  std::size_t batch_size = 16;
  std::size_t max_seq_length = 210;
  std::size_t max_epochs = 20;
  std::size_t patience = 7;
  EmbeddingKind embedding = EmbeddingKind::kToy;
  std::size_t embedding_dim = 32;
  std::uint64_t embedding_seed = 0;
  std::filesystem::path embedding_file;
  std::filesystem::path corpus;
  std::optional<double> positive_weight;  // unset: N_negative / N_positive

  // bert_single trains one head only: alpha is 1 for slc and 0 for flc.
  double resolved_alpha() const;

  // Sets one key from its text value. Throws fgprop::Error on an unknown
  // key or a bad value.
  void set(std::string_view key, std::string_view value);
  // Throws fgprop::Error unless the combination is usable.
  void validate() const;
  std::string to_text() const;
};

// Relative corpus and embedding paths are resolved against `base_dir`.
ExperimentConfig parse_config(std::string_view text, const std::string &source,
                              const std::filesystem::path &base_dir = {});
ExperimentConfig read_config(const std::filesystem::path &path);

std::vector<std::uint64_t> parse_seed_list(std::string_view text);

}  // namespace fgprop

#endif  // FGPROP_CONFIG_H_
