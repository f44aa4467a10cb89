#ifndef FGPROP_OPTIMIZER_H_
#define FGPROP_OPTIMIZER_H_

#include <cstddef>
#include <vector>

#include "fgprop/model.h"

namespace fgprop {

struct AdamConfig {
  double learning_rate = 3e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-6;
  double weight_decay = 0.01;     // decoupled; biases are exempt
  double warmup_proportion = 0.1;
  std::size_t total_steps = 0;    // 0 disables the schedule
};

// Learning-rate multiplier at `step` (0-based): linear ramp from 0 over the
// warmup steps, then linear decay to 0 at total_steps.
double schedule_factor(const AdamConfig &config, std::size_t step);

// Adam with decoupled weight decay over the fixed parameter visit order.
class AdamW {
 public:
  AdamW(const AdamConfig &config, const Parameters &params);

  void step(Parameters &params, const Parameters &grad);
  std::size_t steps_taken() const { return step_; }
  double current_learning_rate() const;

 private:
  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t step_ = 0;
};

}  // namespace fgprop

#endif  // FGPROP_OPTIMIZER_H_
