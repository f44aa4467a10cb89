#include "fgprop/granularity_stack.h"

#include <cmath>
#include <string>

#include "fgprop/error.h"

namespace fgprop {
namespace {

Eigen::VectorXd activate(const GranularityLayer &layer, Eigen::VectorXd z) {
  if (layer.activation == LayerActivation::kSigmoid) {
    return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
  }
  Eigen::ArrayXd e = (z.array() - z.maxCoeff()).exp();
  return (e / e.sum()).matrix();
}

}  // namespace

GranularityStack::GranularityStack(std::vector<Level> levels,
                                   std::vector<Gate> gates)
    : levels_(std::move(levels)), gates_(std::move(gates)) {
  if (levels_.empty()) throw Error("granularity stack needs at least one level");
  if (gates_.size() + 1 != levels_.size()) {
    throw Error("granularity stack with " + std::to_string(levels_.size()) +
                " levels needs " + std::to_string(levels_.size() - 1) + " gates");
  }
  for (std::size_t k = 0; k + 1 < levels_.size(); ++k) {
    if (static_cast<std::size_t>(gates_[k].projection.size()) !=
        levels_[k].layer.classes()) {
      throw Error("gate " + std::to_string(k) + " projection size does not match "
                  "the classes of level " + std::to_string(k));
    }
  }
}

GranularityStack::Output GranularityStack::forward(
    const std::vector<Eigen::MatrixXd> &inputs) const {
  if (inputs.size() != levels_.size()) {
    throw Error("granularity stack expects one input per level");
  }
  Output out;
  // Cumulative gate weight of each unit at the current level.
  Eigen::VectorXd carried = Eigen::VectorXd::Ones(inputs[0].rows());
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    const Level &lv = levels_[k];
    const Eigen::MatrixXd &x = inputs[k];
    if (static_cast<std::size_t>(x.cols()) != lv.layer.inputs()) {
      throw Error("level " + std::to_string(k) + " input dimension mismatch");
    }
    if (!x.allFinite()) throw Error("level " + std::to_string(k) + " input is not finite");
    Eigen::VectorXd unit_weight = carried;
    if (k > 0) {
      if (lv.parent.size() != static_cast<std::size_t>(x.rows())) {
        throw Error("level " + std::to_string(k) + " needs one parent per unit");
      }
      unit_weight.resize(x.rows());
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        std::size_t p = lv.parent[static_cast<std::size_t>(i)];
        if (p >= static_cast<std::size_t>(carried.size())) {
          throw Error("level " + std::to_string(k) + " parent index out of range");
        }
        unit_weight[i] = carried[static_cast<Eigen::Index>(p)];
      }
    }
    Eigen::MatrixXd o = (x * lv.layer.weight.transpose()).rowwise() +
                        lv.layer.bias.transpose();
    if (k > 0) o = unit_weight.asDiagonal() * o;
    out.outputs.push_back(o);

    if (k + 1 < levels_.size()) {
      const Gate &g = gates_[k];
      Eigen::VectorXd w(o.rows());
      for (Eigen::Index i = 0; i < o.rows(); ++i) {
        w[i] = unit_weight[i] * g.weight(g.pre_activation(activate(lv.layer, o.row(i).transpose())));
      }
      out.weights.push_back(w);
      carried = w;
    }
  }
  return out;
}

}  // namespace fgprop
