#include "fgprop/trainer.h"

#include <numeric>
#include <random>

#include "fgprop/error.h"
#include "fgprop/parallel.h"

namespace fgprop {

bool EarlyStopping::update(double score) {
  ++evaluations_;
  improved_ = evaluations_ == 1 || score > best_;
  if (improved_) {
    best_ = score;
    best_evaluation_ = evaluations_;
    since_best_ = 0;
    return false;
  }
  return ++since_best_ >= patience_;
}

TrainResult train(MgnModel model, std::span<const Example> examples,
                  const TrainConfig &config, const Validator &validate) {
  if (examples.empty()) throw Error("training set is empty");
  if (config.batch_size == 0) throw Error("batch size must be positive");
  if (config.max_epochs == 0) throw Error("max_epochs must be positive");

  const std::size_t n = examples.size();
  const std::size_t batches = (n + config.batch_size - 1) / config.batch_size;
  AdamConfig adam = config.adam;
  if (adam.total_steps == 0) adam.total_steps = batches * config.max_epochs;
  AdamW optimizer(adam, model.params);

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  result.model = model;
  EarlyStopping stopping(config.patience);
  std::vector<Parameters> grads(config.batch_size);
  std::vector<Loss> losses(config.batch_size);

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    // Fisher-Yates with raw engine output keeps the order portable.
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(order[i], order[static_cast<std::size_t>(rng() % (i + 1))]);
    }
    EpochLog entry;
    entry.epoch = epoch;
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t first = b * config.batch_size;
      const std::size_t count = std::min(config.batch_size, n - first);
      parallel_for(count, [&](std::size_t i) {
        const Example &ex = examples[order[first + i]];
        grads[i] = backward(model, ex.embeddings, ex.targets, &losses[i]);
      });
      Parameters total = grads[0];
      for (std::size_t i = 1; i < count; ++i) total.add_scaled(grads[i], 1.0);
      Parameters mean = total.zeros_like();
      mean.add_scaled(total, 1.0 / static_cast<double>(count));
      optimizer.step(model.params, mean);
      for (std::size_t i = 0; i < count; ++i) {
        entry.loss += losses[i].total;
        entry.sentence_loss += losses[i].sentence;
        entry.token_loss += losses[i].token;
      }
    }
    entry.loss /= static_cast<double>(n);
    entry.sentence_loss /= static_cast<double>(n);
    entry.token_loss /= static_cast<double>(n);
    entry.learning_rate = optimizer.current_learning_rate();

    if (validate) {
      const double f1 = validate(model);
      entry.validation_f1 = f1;
      const bool stop = stopping.update(f1);
      if (stopping.improved()) {
        result.model = model;
        result.best_epoch = epoch;
      }
      result.log.push_back(entry);
      if (stop) {
        result.stopped_early = true;
        break;
      }
    } else {
      result.model = model;
      result.best_epoch = epoch;
      result.log.push_back(entry);
    }
  }
  return result;
}

}  // namespace fgprop
