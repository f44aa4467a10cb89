#ifndef FGPROP_MODEL_H_
#define FGPROP_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fgprop/technique.h"

namespace fgprop {

// Head arrangements over a shared token representation:
//   bert_single       independent sentence and token heads; the task picks
//                     alpha = 1 (sentence) or alpha = 0 (token)
//   bert_joint        both heads trained jointly
//   bert_granularity  sentence output concatenated with token logits, then
//                     an extra 19-way layer
//   mgn               sentence output drives a gate that scales the token
//                     logits
enum class Architecture { kBertSingle, kBertJoint, kBertGranularity, kMgn };
enum class GateActivation { kRelu, kSigmoid };
enum class LayerActivation { kSigmoid, kSoftmax };

std::string_view architecture_name(Architecture a);
std::optional<Architecture> parse_architecture(std::string_view name);
std::string_view gate_activation_name(GateActivation g);
std::optional<GateActivation> parse_gate_activation(std::string_view name);

inline constexpr std::size_t kSentenceClasses = 2;

// Linear projection to `classes` outputs.
struct GranularityLayer {
  Eigen::MatrixXd weight;  // classes x inputs
  Eigen::VectorXd bias;    // classes
  LayerActivation activation = LayerActivation::kSoftmax;

  std::size_t classes() const { return static_cast<std::size_t>(weight.rows()); }
  std::size_t inputs() const { return static_cast<std::size_t>(weight.cols()); }
  Eigen::VectorXd logits(const Eigen::VectorXd &x) const {
    return weight * x + bias;
  }
};

// Projection to one dimension followed by relu or sigmoid. A frozen gate
// always yields `frozen_weight` and receives no gradient.
struct Gate {
  Eigen::VectorXd projection;
  double bias = 0.0;
  GateActivation activation = GateActivation::kSigmoid;
  std::optional<double> frozen_weight;

  double pre_activation(const Eigen::VectorXd &input) const {
    return projection.dot(input) + bias;
  }
  double weight(double pre) const;
};

struct ModelConfig {
  Architecture architecture = Architecture::kMgn;
  GateActivation gate = GateActivation::kSigmoid;
  std::size_t dimension = 0;
  double alpha = 0.9;
  double positive_weight = 1.0;
  std::uint64_t seed = 0;
};

// Trainable parameters. Also used as the gradient container.
struct Parameters {
  GranularityLayer sentence;  // 2 x d, sigmoid
  GranularityLayer token;     // 19 x d, softmax
  GranularityLayer combined;  // 19 x 21, bert_granularity only
  Gate gate;                  // projection of the 2 sentence outputs; mgn only

  // Same shapes, all zeros (gate settings copied).
  Parameters zeros_like() const;
  void set_zero();
  // this += scale * other (shapes must match).
  void add_scaled(const Parameters &other, double scale);
  std::size_t size() const;

  // Visits every parameter block as (name, data, count, is_bias). The order
  // is fixed and shared by checkpoints and optimizers.
  using Visitor = std::function<void(std::string_view, double *, std::size_t, bool)>;
  using ConstVisitor =
      std::function<void(std::string_view, const double *, std::size_t, bool)>;
  void visit(const Visitor &fn);
  void visit(const ConstVisitor &fn) const;
};

struct MgnModel {
  ModelConfig config;
  Parameters params;

  // Xavier-uniform weights, zero biases, gate bias 1 (open), from
  // config.seed.
  static MgnModel create(const ModelConfig &config);
};

struct ForwardResult {
  Architecture architecture = Architecture::kMgn;
  GateActivation gate_activation = GateActivation::kSigmoid;
  bool gate_frozen = false;

  Eigen::VectorXd sentence_logits;  // 2
  Eigen::VectorXd sentence_output;  // sigmoid(sentence_logits)
  double gate_pre = 0.0;            // mgn only
  double gate_weight = 1.0;         // 1 unless mgn
  Eigen::MatrixXd token_logits;     // tokens x 19, token layer before gating
  Eigen::MatrixXd token_output;     // tokens x 19, final token scores

  // Positive iff the propaganda output beats the non-propaganda output.
  bool sentence_positive() const;
  // Row-wise argmax of token_output; ties go to the lower class, so an
  // all-zero row predicts none.
  std::vector<int> token_classes() const;
};

// `embeddings` has tokens + 1 rows; row 0 is the sentence vector. Throws
// fgprop::Error on a dimension mismatch, zero tokens or non-finite input.
ForwardResult forward(const MgnModel &model, const Eigen::MatrixXd &embeddings);

struct Targets {
  bool sentence_positive = false;
  std::vector<int> token_classes;  // one per token, in [0, 18]
};

struct Loss {
  double total = 0.0;
  double sentence = 0.0;    // weighted sigmoid cross-entropy
  double token = 0.0;       // masked mean softmax cross-entropy
  double token_mask = 1.0;  // factor applied to the token loss
};

// alpha * sentence + (1 - alpha) * token. The sentence loss is the mean
// binary cross-entropy of the two sigmoid outputs, multiplied by
// positive_weight for positive sentences. The token loss is the mean
// softmax cross-entropy over tokens, multiplied by the gate mask: 1[w > 0]
// for relu gates, w for sigmoid gates, 1 without a gate. Throws
// fgprop::Error when a target class is out of range or the token count
// differs from the forward result.
Loss joint_loss(const ForwardResult &out, const Targets &targets, double alpha,
                double positive_weight);

// Exact gradient of joint_loss(forward(model, embeddings), targets,
// model.config.alpha, model.config.positive_weight) with respect to every
// parameter. The relu mask is piecewise constant and contributes no
// gradient.
Parameters backward(const MgnModel &model, const Eigen::MatrixXd &embeddings,
                    const Targets &targets, Loss *loss = nullptr);

}  // namespace fgprop

#endif  // FGPROP_MODEL_H_
