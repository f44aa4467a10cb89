#include "fgprop/model.h"

#include <cmath>
#include <random>

#include "fgprop/error.h"

namespace fgprop {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr Index kTokenClasses = static_cast<Index>(kNumTokenClasses);
constexpr Index kSentence = static_cast<Index>(kSentenceClasses);

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// Binary cross-entropy of logit z against target t, computed stably.
double bce_with_logit(double z, double t) {
  return std::max(z, 0.0) - z * t + std::log1p(std::exp(-std::fabs(z)));
}

double log_sum_exp(const Eigen::Ref<const Eigen::RowVectorXd> &row) {
  double m = row.maxCoeff();
  return m + std::log((row.array() - m).exp().sum());
}

Eigen::RowVectorXd softmax(const Eigen::Ref<const Eigen::RowVectorXd> &row) {
  Eigen::RowVectorXd e = (row.array() - row.maxCoeff()).exp();
  return e / e.sum();
}

// Portable uniform draw in [-limit, limit).
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}
  double operator()(double limit) {
    double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return (2.0 * u - 1.0) * limit;
  }

 private:
  std::mt19937_64 engine_;
};

GranularityLayer xavier_layer(Index classes, Index inputs,
                              LayerActivation activation,
                              UniformSource &uniform) {
  GranularityLayer layer;
  const double limit =
      std::sqrt(6.0 / static_cast<double>(classes + inputs));
  layer.weight.resize(classes, inputs);
  for (Index r = 0; r < classes; ++r) {
    for (Index c = 0; c < inputs; ++c) layer.weight(r, c) = uniform(limit);
  }
  layer.bias = VectorXd::Zero(classes);
  layer.activation = activation;
  return layer;
}

double token_mask(const ForwardResult &out) {
  if (out.architecture != Architecture::kMgn) return 1.0;
  if (out.gate_activation == GateActivation::kRelu) {
    return out.gate_weight > 0.0 ? 1.0 : 0.0;
  }
  return out.gate_weight;
}

void check_targets(const ForwardResult &out, const Targets &targets) {
  if (static_cast<Index>(targets.token_classes.size()) != out.token_output.rows()) {
    throw Error("target has " + std::to_string(targets.token_classes.size()) +
                " token classes for " + std::to_string(out.token_output.rows()) +
                " tokens");
  }
  for (int c : targets.token_classes) {
    if (c < 0 || c >= static_cast<int>(kNumTokenClasses)) {
      throw Error("token target class " + std::to_string(c) +
                  " is outside [0, " + std::to_string(kNumTokenClasses - 1) + "]");
    }
  }
}

}  // namespace

std::string_view architecture_name(Architecture a) {
  switch (a) {
    case Architecture::kBertSingle:
      return "bert_single";
    case Architecture::kBertJoint:
      return "bert_joint";
    case Architecture::kBertGranularity:
      return "bert_granularity";
    case Architecture::kMgn:
      return "mgn";
  }
  return "?";
}

std::optional<Architecture> parse_architecture(std::string_view name) {
  for (auto a : {Architecture::kBertSingle, Architecture::kBertJoint,
                 Architecture::kBertGranularity, Architecture::kMgn}) {
    if (architecture_name(a) == name) return a;
  }
  return std::nullopt;
}

std::string_view gate_activation_name(GateActivation g) {
  return g == GateActivation::kRelu ? "relu" : "sigmoid";
}

std::optional<GateActivation> parse_gate_activation(std::string_view name) {
  if (name == "relu") return GateActivation::kRelu;
  if (name == "sigmoid") return GateActivation::kSigmoid;
  return std::nullopt;
}

double Gate::weight(double pre) const {
  if (frozen_weight) return *frozen_weight;
  return activation == GateActivation::kRelu ? std::max(pre, 0.0) : sigmoid(pre);
}

Parameters Parameters::zeros_like() const {
  Parameters z = *this;
  z.set_zero();
  return z;
}

void Parameters::set_zero() {
  visit([](std::string_view, double *data, std::size_t n, bool) {
    std::fill(data, data + n, 0.0);
  });
}

void Parameters::add_scaled(const Parameters &other, double scale) {
  std::vector<const double *> src;
  std::vector<std::size_t> sizes;
  other.visit([&](std::string_view, const double *data, std::size_t n, bool) {
    src.push_back(data);
    sizes.push_back(n);
  });
  std::size_t block = 0;
  visit([&](std::string_view name, double *data, std::size_t n, bool) {
    if (block >= src.size() || sizes[block] != n) {
      throw Error("parameter shape mismatch at block " + std::string(name));
    }
    for (std::size_t i = 0; i < n; ++i) data[i] += scale * src[block][i];
    ++block;
  });
}

std::size_t Parameters::size() const {
  std::size_t total = 0;
  visit([&](std::string_view, const double *, std::size_t n, bool) { total += n; });
  return total;
}

void Parameters::visit(const Visitor &fn) {
  fn("sentence.weight", sentence.weight.data(),
     static_cast<std::size_t>(sentence.weight.size()), false);
  fn("sentence.bias", sentence.bias.data(),
     static_cast<std::size_t>(sentence.bias.size()), true);
  fn("token.weight", token.weight.data(),
     static_cast<std::size_t>(token.weight.size()), false);
  fn("token.bias", token.bias.data(), static_cast<std::size_t>(token.bias.size()),
     true);
  fn("combined.weight", combined.weight.data(),
     static_cast<std::size_t>(combined.weight.size()), false);
  fn("combined.bias", combined.bias.data(),
     static_cast<std::size_t>(combined.bias.size()), true);
  fn("gate.projection", gate.projection.data(),
     static_cast<std::size_t>(gate.projection.size()), false);
  fn("gate.bias", &gate.bias, 1, true);
}

void Parameters::visit(const ConstVisitor &fn) const {
  const_cast<Parameters *>(this)->visit(
      [&](std::string_view name, double *data, std::size_t n, bool is_bias) {
        fn(name, data, n, is_bias);
      });
}

MgnModel MgnModel::create(const ModelConfig &config) {
  if (config.dimension == 0) throw Error("model dimension must be positive");
  if (config.alpha < 0.0 || config.alpha > 1.0) {
    throw Error("alpha must lie in [0, 1]");
  }
  MgnModel model;
  model.config = config;
  UniformSource uniform(config.seed);
  const auto d = static_cast<Index>(config.dimension);
  Parameters &p = model.params;
  p.sentence = xavier_layer(kSentence, d, LayerActivation::kSigmoid, uniform);
  p.token = xavier_layer(kTokenClasses, d, LayerActivation::kSoftmax, uniform);
  if (config.architecture == Architecture::kBertGranularity) {
    p.combined = xavier_layer(kTokenClasses, kSentence + kTokenClasses,
                              LayerActivation::kSoftmax, uniform);
  } else {
    p.combined.weight.resize(0, 0);
    p.combined.bias.resize(0);
  }
  p.gate.activation = config.gate;
  if (config.architecture == Architecture::kMgn) {
    const double limit = std::sqrt(6.0 / static_cast<double>(kSentence + 1));
    p.gate.projection.resize(kSentence);
    for (Index i = 0; i < kSentence; ++i) p.gate.projection[i] = uniform(limit);
    p.gate.bias = 1.0;
  } else {
    p.gate.projection.resize(0);
    p.gate.bias = 0.0;
  }
  return model;
}

bool ForwardResult::sentence_positive() const {
  return sentence_output[1] > sentence_output[0];
}

std::vector<int> ForwardResult::token_classes() const {
  std::vector<int> out(static_cast<std::size_t>(token_output.rows()), kNoneClass);
  for (Index i = 0; i < token_output.rows(); ++i) {
    Index best = 0;
    for (Index c = 1; c < token_output.cols(); ++c) {
      if (token_output(i, c) > token_output(i, best)) best = c;
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

ForwardResult forward(const MgnModel &model, const MatrixXd &embeddings) {
  const Parameters &p = model.params;
  const auto d = static_cast<Index>(model.config.dimension);
  if (embeddings.cols() != d) {
    throw Error("embedding dimension " + std::to_string(embeddings.cols()) +
                " does not match model dimension " + std::to_string(d));
  }
  if (embeddings.rows() < 2) {
    throw Error("forward needs at least one token");
  }
  if (!embeddings.allFinite()) throw Error("embedding has non-finite values");

  ForwardResult out;
  out.architecture = model.config.architecture;
  out.gate_activation = p.gate.activation;
  out.gate_frozen = p.gate.frozen_weight.has_value();

  const VectorXd sentence_vec = embeddings.row(0).transpose();
  const auto tokens = embeddings.bottomRows(embeddings.rows() - 1);
  out.sentence_logits = p.sentence.logits(sentence_vec);
  out.sentence_output = out.sentence_logits.unaryExpr(&sigmoid);

  out.token_logits = (tokens * p.token.weight.transpose()).rowwise() +
                     p.token.bias.transpose();

  switch (model.config.architecture) {
    case Architecture::kBertSingle:
    case Architecture::kBertJoint:
      out.token_output = out.token_logits;
      break;
    case Architecture::kBertGranularity: {
      const auto n = out.token_logits.rows();
      MatrixXd concat(n, kSentence + kTokenClasses);
      concat.leftCols(kSentence) =
          out.sentence_output.transpose().replicate(n, 1);
      concat.rightCols(kTokenClasses) = out.token_logits;
      out.token_output = (concat * p.combined.weight.transpose()).rowwise() +
                         p.combined.bias.transpose();
      break;
    }
    case Architecture::kMgn:
      out.gate_pre = p.gate.pre_activation(out.sentence_output);
      out.gate_weight = p.gate.weight(out.gate_pre);
      out.token_output = out.gate_weight * out.token_logits;
      break;
  }
  return out;
}

Loss joint_loss(const ForwardResult &out, const Targets &targets, double alpha,
                double positive_weight) {
  if (alpha < 0.0 || alpha > 1.0) throw Error("alpha must lie in [0, 1]");
  check_targets(out, targets);
  Loss loss;
  const double t1 = targets.sentence_positive ? 1.0 : 0.0;
  const double example_weight = targets.sentence_positive ? positive_weight : 1.0;
  loss.sentence = example_weight * 0.5 *
                  (bce_with_logit(out.sentence_logits[0], 1.0 - t1) +
                   bce_with_logit(out.sentence_logits[1], t1));

  double ce = 0.0;
  for (Index i = 0; i < out.token_output.rows(); ++i) {
    const auto y = static_cast<Index>(targets.token_classes[static_cast<std::size_t>(i)]);
    ce += log_sum_exp(out.token_output.row(i)) - out.token_output(i, y);
  }
  ce /= static_cast<double>(out.token_output.rows());
  loss.token_mask = token_mask(out);
  loss.token = loss.token_mask == 0.0 ? 0.0 : loss.token_mask * ce;
  loss.total = alpha * loss.sentence + (1.0 - alpha) * loss.token;
  return loss;
}

Parameters backward(const MgnModel &model, const MatrixXd &embeddings,
                    const Targets &targets, Loss *loss_out) {
  const Parameters &p = model.params;
  const double alpha = model.config.alpha;
  const ForwardResult out = forward(model, embeddings);
  const Loss loss = joint_loss(out, targets, alpha, model.config.positive_weight);
  if (loss_out) *loss_out = loss;

  Parameters g = p.zeros_like();
  const VectorXd h0 = embeddings.row(0).transpose();
  const auto tokens = embeddings.bottomRows(embeddings.rows() - 1);
  const Index n = out.token_output.rows();

  // Token loss with respect to the final token scores.
  const double mask = loss.token_mask;
  MatrixXd g_out = MatrixXd::Zero(n, kTokenClasses);
  double raw_ce = 0.0;
  if (mask != 0.0) {
    const double scale = (1.0 - alpha) * mask / static_cast<double>(n);
    for (Index i = 0; i < n; ++i) {
      const auto y = static_cast<Index>(targets.token_classes[static_cast<std::size_t>(i)]);
      g_out.row(i) = softmax(out.token_output.row(i)) * scale;
      g_out(i, y) -= scale;
      raw_ce += log_sum_exp(out.token_output.row(i)) - out.token_output(i, y);
    }
    raw_ce /= static_cast<double>(n);
  }

  VectorXd g_sentence_output = VectorXd::Zero(kSentence);
  MatrixXd g_token_logits;
  switch (model.config.architecture) {
    case Architecture::kBertSingle:
    case Architecture::kBertJoint:
      g_token_logits = g_out;
      break;
    case Architecture::kBertGranularity: {
      MatrixXd concat(n, kSentence + kTokenClasses);
      concat.leftCols(kSentence) = out.sentence_output.transpose().replicate(n, 1);
      concat.rightCols(kTokenClasses) = out.token_logits;
      g.combined.weight = g_out.transpose() * concat;
      g.combined.bias = g_out.colwise().sum().transpose();
      const MatrixXd g_concat = g_out * p.combined.weight;
      g_sentence_output += g_concat.leftCols(kSentence).colwise().sum().transpose();
      g_token_logits = g_concat.rightCols(kTokenClasses);
      break;
    }
    case Architecture::kMgn: {
      const double w = out.gate_weight;
      g_token_logits = w * g_out;
      if (!p.gate.frozen_weight) {
        double g_w = (g_out.array() * out.token_logits.array()).sum();
        if (p.gate.activation == GateActivation::kSigmoid) {
          // Soft mask: the token loss is multiplied by w itself.
          g_w += (1.0 - alpha) * raw_ce;
        }
        const double dw_da = p.gate.activation == GateActivation::kRelu
                                 ? (out.gate_pre > 0.0 ? 1.0 : 0.0)
                                 : w * (1.0 - w);
        const double g_a = g_w * dw_da;
        g.gate.projection = g_a * out.sentence_output;
        g.gate.bias = g_a;
        g_sentence_output += g_a * p.gate.projection;
      }
      break;
    }
  }

  g.token.weight = g_token_logits.transpose() * tokens;
  g.token.bias = g_token_logits.colwise().sum().transpose();

  // Sentence loss with respect to the sentence logits.
  const double t1 = targets.sentence_positive ? 1.0 : 0.0;
  const double example_weight =
      targets.sentence_positive ? model.config.positive_weight : 1.0;
  VectorXd target(kSentence);
  target << 1.0 - t1, t1;
  VectorXd g_logits = alpha * example_weight * 0.5 *
                      (out.sentence_output - target);
  g_logits.array() += g_sentence_output.array() * out.sentence_output.array() *
                      (1.0 - out.sentence_output.array());
  g.sentence.weight = g_logits * h0.transpose();
  g.sentence.bias = g_logits;
  return g;
}

}  // namespace fgprop
