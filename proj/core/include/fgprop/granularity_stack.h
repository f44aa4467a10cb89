#ifndef FGPROP_GRANULARITY_STACK_H_
#define FGPROP_GRANULARITY_STACK_H_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "fgprop/model.h"

namespace fgprop {

// Ordered layers from coarsest (k = 0) to finest, with a gate between each
// consecutive pair. Level k has units(k) input rows; parent[k + 1][i] names
// the unit of level k that contains unit i of level k + 1.
//
// Gates compound down the chain: the weight reaching level k + 1 is the
// product of every gate above it, so a zero gate at any level silences all
// finer levels under that unit.
class GranularityStack {
 public:
  struct Level {
    GranularityLayer layer;
    std::vector<std::size_t> parent;  // empty for level 0
  };

  GranularityStack(std::vector<Level> levels, std::vector<Gate> gates);

  std::size_t depth() const { return levels_.size(); }
  const Level &level(std::size_t k) const { return levels_.at(k); }
  const Gate &gate(std::size_t k) const { return gates_.at(k); }

  struct Output {
    std::vector<Eigen::MatrixXd> outputs;  // units x classes, per level
    std::vector<Eigen::VectorXd> weights;  // gate weight per unit of level k + 1
  };

  // inputs[k] is units x dimension for level k. Throws fgprop::Error on shape
  // or parent-index mismatch.
  Output forward(const std::vector<Eigen::MatrixXd> &inputs) const;

 private:
  std::vector<Level> levels_;
  std::vector<Gate> gates_;
};

}  // namespace fgprop

#endif  // FGPROP_GRANULARITY_STACK_H_
