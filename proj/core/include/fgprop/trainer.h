#ifndef FGPROP_TRAINER_H_
#define FGPROP_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fgprop/model.h"
#include "fgprop/optimizer.h"

namespace fgprop {

// One sentence: (tokens + 1) x d embeddings and its targets.
struct Example {
  Eigen::MatrixXd embeddings;
  Targets targets;
};

struct TrainConfig {
  AdamConfig adam;
  std::size_t batch_size = 16;
  std::size_t max_epochs = 20;
  std::size_t patience = 7;
  std::uint64_t seed = 0;  // shuffling order
};

// Stops after `patience` consecutive evaluations without a strict
// improvement over the best score seen.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  // Records a score; returns true when training should stop.
  bool update(double score);
  bool improved() const { return improved_; }
  double best() const { return best_; }
  std::size_t best_evaluation() const { return best_evaluation_; }
  std::size_t evaluations() const { return evaluations_; }

 private:
  std::size_t patience_;
  double best_ = 0.0;
  std::size_t best_evaluation_ = 0;
  std::size_t evaluations_ = 0;
  std::size_t since_best_ = 0;
  bool improved_ = false;
};

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;
  double sentence_loss = 0.0;
  double token_loss = 0.0;
  double learning_rate = 0.0;  // at the end of the epoch
  std::optional<double> validation_f1;
};

struct TrainResult {
  MgnModel model;  // best by validation F1, or the last epoch without one
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  bool stopped_early = false;
};

using Validator = std::function<double(const MgnModel &)>;

// Mini-batch AdamW on the mean example loss. Example gradients are computed
// in parallel and summed in index order, so results are identical for any
// worker count. Throws fgprop::Error on an empty training set.
TrainResult train(MgnModel model, std::span<const Example> examples,
                  const TrainConfig &config, const Validator &validate = {});

}  // namespace fgprop

#endif  // FGPROP_TRAINER_H_
