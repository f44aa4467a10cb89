#include "fgprop/optimizer.h"

#include <cmath>

#include "fgprop/error.h"

namespace fgprop {

double schedule_factor(const AdamConfig &config, std::size_t step) {
  if (config.total_steps == 0) return 1.0;
  const double total = static_cast<double>(config.total_steps);
  const double warmup = config.warmup_proportion * total;
  const double s = static_cast<double>(step);
  if (s < warmup) return (s + 1.0) / (warmup + 1.0);
  if (s >= total) return 0.0;
  return std::max(0.0, (total - s) / std::max(1.0, total - warmup));
}

AdamW::AdamW(const AdamConfig &config, const Parameters &params)
    : config_(config), m_(params.size(), 0.0), v_(params.size(), 0.0) {
  if (config.learning_rate <= 0) throw Error("learning rate must be positive");
  if (config.warmup_proportion < 0 || config.warmup_proportion >= 1) {
    throw Error("warmup proportion must lie in [0, 1)");
  }
}

double AdamW::current_learning_rate() const {
  return config_.learning_rate * schedule_factor(config_, step_);
}

void AdamW::step(Parameters &params, const Parameters &grad) {
  std::vector<const double *> g;
  grad.visit([&](std::string_view, const double *data, std::size_t, bool) {
    g.push_back(data);
  });
  const double lr = current_learning_rate();
  ++step_;
  const double t = static_cast<double>(step_);
  const double c1 = 1.0 - std::pow(config_.beta1, t);
  const double c2 = 1.0 - std::pow(config_.beta2, t);
  std::size_t offset = 0;
  std::size_t block = 0;
  params.visit([&](std::string_view, double *data, std::size_t n, bool is_bias) {
    const double *gb = g.at(block++);
    for (std::size_t i = 0; i < n; ++i) {
      double &m = m_[offset + i];
      double &v = v_[offset + i];
      m = config_.beta1 * m + (1.0 - config_.beta1) * gb[i];
      v = config_.beta2 * v + (1.0 - config_.beta2) * gb[i] * gb[i];
      double update = (m / c1) / (std::sqrt(v / c2) + config_.epsilon);
      if (!is_bias) update += config_.weight_decay * data[i];
      data[i] -= lr * update;
    }
    offset += n;
  });
}

}  // namespace fgprop
