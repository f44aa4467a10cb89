// Acceptance checks. One PASS/FAIL/SKIP line per criterion; the exit code is
// nonzero when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fgprop/corpus.h"
#include "fgprop/metric.h"
#include "fgprop/model.h"
#include "fgprop/pipeline.h"
#include "fgprop/stats.h"
#include "fgprop/synthetic.h"
#include "fgprop/trainer.h"
#include "oracles.h"

namespace fgprop {
namespace {

// Pinned tolerances.
constexpr double kMetricTolerance = 1e-12;
constexpr double kGradientTolerance = 1e-4;
constexpr double kFiniteDifferenceStep = 1e-5;
constexpr double kReluKinkMargin = 1e-3;
constexpr double kLengthTolerance = 0.5;
constexpr double kBaselineTolerance = 0.05;  // percentage points

constexpr int kDualityPairs = 10000;
constexpr int kOracleCases = 1000;
constexpr int kGradientParameterizations = 20;
constexpr std::size_t kOverfitSentences = 20;
constexpr std::size_t kOverfitEpochs = 200;
constexpr double kMetricSeconds = 10.0;
constexpr double kOverfitSeconds = 60.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  enum Kind { kPass, kFail, kSkip } kind;
  std::string detail;
};

Outcome pass(std::string d) { return {Outcome::kPass, std::move(d)}; }
Outcome fail(std::string d) { return {Outcome::kFail, std::move(d)}; }
Outcome skip(std::string d) { return {Outcome::kSkip, std::move(d)}; }

template <typename... Args>
std::string fmt(const char *f, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

constexpr Technique kL = Technique::kLoadedLanguage;
constexpr Technique kM = Technique::kNameCalling;

// ---- metric suite ---------------------------------------------------------

Outcome metric_suite() {
  const auto t0 = Clock::now();
  const auto full = MatchMode::kFullTask;
  const auto spans = MatchMode::kSpansOnly;
  auto one = [](std::vector<Fragment> f) { return AnnotationSet{"d", std::move(f)}; };
  std::vector<std::string> bad;
  auto expect = [&](bool ok, const char *what) {
    if (!ok) bad.push_back(what);
  };

  expect(overlap_credit({0, 10, kL}, {0, 10, kL}, 10, full) == 1.0, "credit identical");
  expect(overlap_credit({5, 15, kL}, {0, 10, kL}, 10, full) == 0.5, "credit half");
  expect(overlap_credit({0, 10, kL}, {0, 10, kM}, 10, full) == 0.0, "credit label mismatch");
  expect(overlap_credit({0, 10, kL}, {0, 10, kM}, 10, spans) == 1.0, "credit spans only");
  expect(precision(one({{0, 10, kL}}), one({{0, 10, kL}}), full) == 1.0, "precision identical");
  expect(precision(one({}), one({{0, 10, kL}}), full) == 0.0, "precision empty S");
  expect(std::fabs(precision(one({{0, 30, kL}}), one({{0, 10, kL}, {20, 30, kL}}), full) -
                   20.0 / 30.0) <= kMetricTolerance,
         "precision two gold");
  expect(recall(one({{3, 9, kL}}), one({{3, 9, kL}}), full) == 1.0, "recall identical");
  expect(recall(one({{5, 15, kL}}), one({{0, 10, kL}}), full) == 0.5, "recall half");
  expect(recall(one({{5, 15, kL}}), one({}), full) == 0.0, "recall empty T");
  expect(harmonic_mean(0.5, 0.5) == 0.5, "f1 of halves");
  expect(harmonic_mean(1.0, 0.0) == 0.0, "f1 with zero recall");

  std::vector<bool> gold(10000, false);
  for (std::size_t i = 0; i < 2392; ++i) gold[i * 4] = true;
  expect(format_prf(slc_metrics(std::vector<bool>(gold.size(), true), gold)) ==
             "P 23.92 R 100.00 F1 38.61",
         "slc all positive");
  std::vector<bool> g = {true, false, false, true}, ng = {false, true, true, false};
  expect(slc_metrics(g, g).f1 == 1.0, "slc identical");
  const ScoreReport inv = slc_metrics(ng, g);
  expect(inv.precision == 0.0 && inv.recall == 0.0 && inv.f1 == 0.0, "slc inverted");

  // Penalization: a perfect prediction plus a poorly overlapping one.
  const AnnotationSet T = one({{20, 80, kL}});
  const double pa = precision(one({{50, 70, kL}}), T, full);
  const double pb = precision(one({{10, 30, kL}, {50, 70, kL}}), T, full);
  expect(pa == 1.0 && pb == 0.75 && pb < pa, "penalization");

  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int i = 0; i < kDualityPairs; ++i) {
    Annotations S, Tr;
    for (const char *id : {"a", "b"}) {
      const std::size_t len = 1 + rng() % 200;
      S[id] = oracle::random_set(rng, id, len, 6);
      Tr[id] = oracle::random_set(rng, id, len, 6);
    }
    for (auto mode : {full, spans}) {
      worst = std::max(worst, std::fabs(precision(S, Tr, mode) - recall(Tr, S, mode)));
    }
  }
  expect(worst <= kMetricTolerance, "duality");
  const double secs = seconds_since(t0);
  expect(secs < kMetricSeconds, "runtime");

  std::string detail = fmt("%d duality pairs, max |P(S,T)-R(T,S)| = %.1e, %.2f s",
                           kDualityPairs, worst, secs);
  if (!bad.empty()) {
    detail += "; failed:";
    for (const auto &b : bad) detail += " [" + b + "]";
    return fail(detail);
  }
  return pass(detail);
}

// ---- brute-force oracle ---------------------------------------------------

Outcome oracle_equivalence() {
  std::mt19937_64 rng(77);
  double worst = 0.0;
  for (int i = 0; i < kOracleCases; ++i) {
    const std::size_t len = 1 + rng() % 200;
    Annotations S = {{"d", oracle::random_set(rng, "d", len, 6)}};
    Annotations T = {{"d", oracle::random_set(rng, "d", len, 6)}};
    for (bool spans_only : {false, true}) {
      const MatchMode mode = spans_only ? MatchMode::kSpansOnly : MatchMode::kFullTask;
      const ScoreReport r = score(S, T, {.mode = mode});
      const double op = oracle::precision(S, T, spans_only);
      const double orc = oracle::recall(S, T, spans_only);
      worst = std::max({worst, std::fabs(r.precision - op), std::fabs(r.recall - orc),
                        std::fabs(r.f1 - harmonic_mean(op, orc))});
    }
  }
  std::string d = fmt("%d cases, max deviation %.1e", kOracleCases, worst);
  return worst <= kMetricTolerance ? pass(d) : fail(d);
}

// ---- gradients ------------------------------------------------------------

double uniform(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Outcome gradient_checks() {
  std::mt19937_64 rng(4242);
  double worst = 0.0;
  int checked = 0;
  std::string where;
  for (auto a : {Architecture::kBertSingle, Architecture::kBertJoint,
                 Architecture::kBertGranularity, Architecture::kMgn}) {
    for (auto g : {GateActivation::kRelu, GateActivation::kSigmoid}) {
      for (int rep = 0; rep < kGradientParameterizations;) {
        ModelConfig c;
        c.architecture = a;
        c.gate = g;
        c.dimension = 2 + rng() % 4;
        c.alpha = uniform(rng);
        c.positive_weight = 0.5 + 4.0 * uniform(rng);
        c.seed = rng();
        MgnModel m = MgnModel::create(c);
        m.params.visit([&](std::string_view, double *p, std::size_t n, bool) {
          for (std::size_t i = 0; i < n; ++i) p[i] += 0.5 * (uniform(rng) - 0.5);
        });
        if (rep % 2) m.params.gate.bias -= 2.0;  // exercise closed gates too
        const std::size_t tokens = 1 + rng() % 5;
        Eigen::MatrixXd x(static_cast<Eigen::Index>(tokens + 1),
                          static_cast<Eigen::Index>(c.dimension));
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 2.0 * uniform(rng) - 1.0;
        Targets t;
        t.sentence_positive = rng() % 2;
        for (std::size_t i = 0; i < tokens; ++i) {
          t.token_classes.push_back(static_cast<int>(rng() % kNumTokenClasses));
        }
        // Finite differences are undefined across the relu kink.
        if (a == Architecture::kMgn && g == GateActivation::kRelu &&
            std::fabs(forward(m, x).gate_pre) < kReluKinkMargin) {
          continue;
        }
        const auto analytic = oracle::flatten(backward(m, x, t));
        const auto numeric = oracle::numeric_gradient(m, x, t, kFiniteDifferenceStep);
        for (std::size_t k = 0; k < analytic.size(); ++k) {
          const double e = oracle::relative_error(analytic[k], numeric[k]);
          if (e > worst) {
            worst = e;
            where = std::string(architecture_name(a)) + "/" +
                    std::string(gate_activation_name(g));
          }
        }
        ++rep;
        ++checked;
      }
    }
  }
  std::string d = fmt("%d parameterizations over 4 modes x 2 gates, max relative error %.2e",
                      checked, worst);
  if (!where.empty()) d += " (" + where + ")";
  return worst < kGradientTolerance ? pass(d) : fail(d);
}

// ---- gate semantics -------------------------------------------------------

Outcome gate_semantics() {
  std::mt19937_64 rng(5);
  int cases = 0;
  for (int rep = 0; rep < 50; ++rep) {
    ModelConfig c;
    c.architecture = Architecture::kMgn;
    c.gate = GateActivation::kRelu;
    c.dimension = 3 + rng() % 5;
    c.alpha = 0.1 + 0.8 * uniform(rng);
    c.seed = rng();
    MgnModel m = MgnModel::create(c);
    // Any bias below -sum|projection| closes the gate for sigmoid inputs.
    m.params.gate.bias = -(m.params.gate.projection.cwiseAbs().sum() + 0.1 + uniform(rng));
    const std::size_t tokens = 1 + rng() % 6;
    Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(
        static_cast<Eigen::Index>(tokens + 1), static_cast<Eigen::Index>(c.dimension),
        [&]() { return 2.0 * uniform(rng) - 1.0; });
    Targets t;
    t.sentence_positive = rng() % 2;
    for (std::size_t i = 0; i < tokens; ++i) {
      t.token_classes.push_back(static_cast<int>(rng() % kNumTokenClasses));
    }
    const ForwardResult out = forward(m, x);
    Loss l;
    const Parameters g = backward(m, x, t, &l);
    const bool ok = out.gate_pre < 0 && out.gate_weight == 0.0 &&
                    (out.token_output.array() == 0.0).all() && l.token_mask == 0.0 &&
                    l.total == c.alpha * l.sentence && (g.token.weight.array() == 0.0).all() &&
                    (g.token.bias.array() == 0.0).all() &&
                    (g.gate.projection.array() == 0.0).all() && g.gate.bias == 0.0;
    if (!ok) return fail("closed relu gate leaked into token outputs, loss or gradients");
    ++cases;
  }
  return pass(std::to_string(cases) +
              " closed-gate examples: token outputs, masked token loss and token/gate "
              "gradients exactly zero");
}

// ---- overfit --------------------------------------------------------------

Outcome overfit() {
  const auto t0 = Clock::now();
  SyntheticOptions o;
  o.articles = 2;
  o.min_sentences = o.max_sentences = kOverfitSentences / 2;
  o.blank_line_rate = 0.0;
  o.positive_rate = 1.0;
  o.seed = 3;
  const Corpus corpus = make_synthetic_corpus(o);
  std::vector<std::string> ids;
  for (const auto &[id, doc] : corpus.documents) ids.push_back(id);
  const ToyEmbedding toy(96, 0);
  const PreparedSplit data = prepare_split(corpus, ids, toy, 210);
  if (data.examples.size() != kOverfitSentences) {
    return fail("fixture has " + std::to_string(data.examples.size()) + " sentences");
  }
  ModelConfig mc;
  mc.architecture = Architecture::kMgn;
  mc.gate = GateActivation::kRelu;
  mc.dimension = toy.dimension();
  mc.alpha = 0.1;
  mc.seed = 1;
  std::vector<Example> examples;
  for (const auto &e : data.examples) examples.push_back(e.example);
  TrainConfig tc;
  tc.adam.learning_rate = 0.05;
  tc.adam.weight_decay = 0.0;
  tc.batch_size = 4;
  tc.max_epochs = kOverfitEpochs;
  tc.patience = kOverfitEpochs;
  tc.seed = 1;
  std::size_t epoch = 0, reached = 0;
  const auto train_f1 = [&](const MgnModel &m) {
    ++epoch;
    const double f = evaluate(predict(m, data, corpus), corpus, ids).flc_full.f1;
    if (f == 1.0 && reached == 0) reached = epoch;
    return f;
  };
  const TrainResult r = train(MgnModel::create(mc), examples, tc, train_f1);
  const double f1 = evaluate(predict(r.model, data, corpus), corpus, ids).flc_full.f1;
  const double secs = seconds_since(t0);
  std::string d = fmt("%zu sentences, training full-task F1 %.4f, %.2f s", kOverfitSentences,
                      f1, secs);
  if (reached) d += ", first reached at epoch " + std::to_string(reached);
  return f1 == 1.0 && reached > 0 && reached <= kOverfitEpochs && secs < kOverfitSeconds
             ? pass(d)
             : fail(d);
}

// ---- released corpus ------------------------------------------------------

Outcome released_corpus() {
  const char *dir = std::getenv("FGPROP_PTC_DIR");
  if (!dir || !*dir) return skip("FGPROP_PTC_DIR not set; released corpus absent");
  const std::filesystem::path data = FGPROP_DATA_DIR;
  std::vector<std::string> bad;
  std::string detail;
  try {
    const Corpus corpus = load_corpus(CorpusPaths::from_root(dir));
    const CorpusStats stats = compute_stats(corpus);
    const auto table = nlohmann::json::parse(read_file(data / "expected" / "ptc_table5.json"));
    ExpectationReport er = check_expected(stats, table, kLengthTolerance);
    for (auto &m : er.mismatches) bad.push_back(m);
    const auto split = nlohmann::json::parse(read_file(data / "expected" / "ptc_split.json"));
    SplitReport sr = verify_split(corpus, &split);
    for (auto &m : sr.mismatches) bad.push_back(m);
    const auto test_ids = corpus.ids_in(Split::kTest);
    const ScoreReport base = all_propaganda_baseline(corpus, test_ids);
    const double p = 100 * base.precision, r = 100 * base.recall, f = 100 * base.f1;
    if (std::fabs(p - 23.92) > kBaselineTolerance || std::fabs(r - 100.0) > kBaselineTolerance ||
        std::fabs(f - 38.61) > kBaselineTolerance) {
      bad.push_back(fmt("all-propaganda baseline P %.2f R %.2f F1 %.2f", p, r, f));
    }
    detail = std::to_string(corpus.documents.size()) + " articles, " +
             std::to_string(stats.total_instances) + " instances; " + format_prf(base);
  } catch (const std::exception &e) {
    return fail(std::string("cannot evaluate: ") + e.what());
  }
  if (!bad.empty()) {
    for (const auto &b : bad) detail += "; " + b;
    return fail(detail);
  }
  return pass(detail);
}

// ---- substitute for trained-encoder scores --------------------------------

Outcome mode_equivalence() {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 100; ++rep) {
    ModelConfig c;
    c.architecture = Architecture::kBertJoint;
    c.dimension = 2 + rng() % 6;
    c.seed = rng();
    const MgnModel joint = MgnModel::create(c);
    for (auto g : {GateActivation::kRelu, GateActivation::kSigmoid}) {
      c.architecture = Architecture::kMgn;
      c.gate = g;
      c.seed = rng();
      MgnModel mgn = MgnModel::create(c);
      mgn.params.sentence = joint.params.sentence;
      mgn.params.token = joint.params.token;
      mgn.params.gate.frozen_weight = 1.0;
      const std::size_t tokens = 1 + rng() % 6;
      Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(
          static_cast<Eigen::Index>(tokens + 1), static_cast<Eigen::Index>(c.dimension),
          [&]() { return 2.0 * uniform(rng) - 1.0; });
      const ForwardResult a = forward(joint, x), b = forward(mgn, x);
      if (a.sentence_output != b.sentence_output || a.token_output != b.token_output) {
        return fail("mgn with gate frozen to 1 differs from bert_joint");
      }
    }
  }
  return pass(
      "NOT REPRODUCED: trained-model FLC/SLC scores need a fine-tuned large pretrained "
      "encoder; substitute invariant holds: gate frozen to 1 gives outputs identical to "
      "bert_joint on 200 random cases");
}

}  // namespace
}  // namespace fgprop

int main() {
  using namespace fgprop;
  struct Criterion {
    const char *name;
    std::function<Outcome()> check;
  };
  const Criterion criteria[] = {
      {"metric-suite", metric_suite},
      {"oracle-equivalence", oracle_equivalence},
      {"gradient-checks", gradient_checks},
      {"gate-semantics", gate_semantics},
      {"overfit", overfit},
      {"released-corpus", released_corpus},
      {"trained-scores-substitute", mode_equivalence},
  };
  int failures = 0;
  for (const auto &c : criteria) {
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception &e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char *tag = o.kind == Outcome::kPass ? "PASS" : o.kind == Outcome::kFail ? "FAIL" : "SKIP";
    std::printf("%s  %-26s %s\n", tag, c.name, o.detail.c_str());
    std::fflush(stdout);
    failures += o.kind == Outcome::kFail;
  }
  return failures == 0 ? 0 : 1;
}
