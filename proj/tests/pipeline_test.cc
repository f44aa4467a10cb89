#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "fgprop/error.h"
#include "fgprop/pipeline.h"
#include "fgprop/synthetic.h"
#include "fgprop/utf8.h"
#include "oracles.h"
#include "test_util.h"

namespace fgprop {
namespace {

constexpr Technique kL = Technique::kLoadedLanguage;
constexpr Technique kM = Technique::kNameCalling;

TokenAlignment alignment_of(std::vector<Token> tokens, std::size_t sentence = 0) {
  TokenAlignment a;
  a.doc_id = "d";
  a.sentence_of.assign(tokens.size(), sentence);
  a.tokens = std::move(tokens);
  return a;
}

TEST(Projection, InsideNoneAndTieBreaks) {
  TokenAlignment a = alignment_of({{0, 3}, {4, 8}, {9, 14}});
  // Token 0 inside an L fragment, token 1 untouched, token 2 covered by two.
  AnnotationSet gold{"d", {Fragment(0, 3, kL), Fragment(9, 12, kM), Fragment(10, 14, kL)}};
  EXPECT_EQ(project_gold_to_tokens(gold, a),
            (std::vector<int>{token_class(kL), kNoneClass, token_class(kM)}));
}

TEST(Projection, TieOrderIsStartThenLengthThenIndex) {
  TokenAlignment a = alignment_of({{4, 8}});
  // The winner must not depend on input order.
  std::vector<Fragment> cands = {Fragment(5, 7, kM), Fragment(2, 6, kM), Fragment(2, 9, kM),
                                 Fragment(2, 9, kL)};
  std::sort(cands.begin(), cands.end());
  do {
    AnnotationSet gold{"d", cands};
    // Earliest start is 2; the longest from 2 ends at 9; L has the lower index.
    EXPECT_EQ(project_gold_to_tokens(gold, a), std::vector<int>{token_class(kL)});
  } while (std::next_permutation(cands.begin(), cands.end()));
}

TEST(Decode, RunsBecomeFragmentsAbsorbingGaps) {
  TokenAlignment a = alignment_of({{0, 3}, {4, 8}, {9, 14}, {15, 20}});
  const int L = token_class(kL);
  std::vector<int> c = {kNoneClass, L, L, kNoneClass};
  AnnotationSet out = decode_fragments(c, a);
  EXPECT_EQ(out.fragments, std::vector<Fragment>{Fragment(4, 14, kL)});
  EXPECT_TRUE(decode_fragments(std::vector<int>(4, kNoneClass), a).empty());
}

TEST(Decode, AlternatingLabelsSplitRuns) {
  TokenAlignment a = alignment_of({{0, 3}, {4, 8}, {9, 14}});
  const int L = token_class(kL), M = token_class(kM);
  AnnotationSet out = decode_fragments(std::vector<int>{L, M, L}, a);
  EXPECT_EQ(out.fragments,
            (std::vector<Fragment>{Fragment(0, 3, kL), Fragment(4, 8, kM), Fragment(9, 14, kL)}));
}

TEST(Decode, RunsStopAtSentenceBoundaries) {
  TokenAlignment a = alignment_of({{0, 3}, {4, 8}});
  a.sentence_of = {0, 1};
  const int L = token_class(kL);
  EXPECT_EQ(decode_fragments(std::vector<int>{L, L}, a).size(), 2u);
  EXPECT_THROW(decode_fragments(std::vector<int>{L}, a), Error);
  EXPECT_THROW(decode_fragments(std::vector<int>{L, 19}, a), Error);
}

// Characters of gold fragments that a token-level round trip can recover:
// every gold character inside some token, credited per fragment.
TEST(RoundTrip, ProjectThenDecodeMeetsCoverageBound) {
  std::mt19937_64 rng(21);
  const std::u32string text = U"alpha beta, gamma delta epsilon. zeta eta theta iota";
  const Document doc("d", text);
  ToyEmbedding toy(4, 0);
  const TokenAlignment a = align_document(doc, toy, 210);
  std::set<std::size_t> in_token;
  for (const Token &t : a.tokens) {
    for (std::size_t i = t.begin; i < t.end; ++i) in_token.insert(i);
  }
  for (int rep = 0; rep < 300; ++rep) {
    // One fragment keeps the projection free of ties.
    AnnotationSet gold{"d", {}};
    std::size_t b = rng() % text.size();
    std::size_t e = b + 1 + rng() % 12;
    gold.fragments.emplace_back(b, std::min(e, text.size()), kL);
    AnnotationSet pred = decode_fragments(project_gold_to_tokens(gold, a), a);
    const Fragment &g = gold.fragments[0];
    std::size_t covered = 0;
    for (std::size_t i = g.begin(); i < g.end(); ++i) covered += in_token.count(i);
    auto r = f1(pred, gold, MatchMode::kSpansOnly);
    // Recall can only lose gold characters that sit outside every token.
    EXPECT_GE(r.recall + 1e-12, static_cast<double>(covered) / g.length());
  }
}

TEST(RoundTrip, TokenAlignedSyntheticGoldIsExact) {
  Corpus c = make_synthetic_corpus({});
  ToyEmbedding toy(8, 0);
  Annotations decoded;
  for (const auto &[id, doc] : c.documents) {
    TokenAlignment a = align_document(doc, toy, 210);
    decoded[id] = decode_fragments(project_gold_to_tokens(c.gold_for(id), a), a);
  }
  for (auto mode : {MatchMode::kSpansOnly, MatchMode::kFullTask}) {
    auto r = score(decoded, c.gold, {.mode = mode});
    EXPECT_DOUBLE_EQ(r.f1, 1.0);
  }
}

TEST(Align, TruncatesLongSentences) {
  const Document doc("d", U"a b c d e\nf g");
  ToyEmbedding toy(4, 0);
  std::size_t dropped = 0;
  TokenAlignment a = align_document(doc, toy, 3, &dropped);
  EXPECT_EQ(a.size(), 5u);
  EXPECT_EQ(dropped, 2u);
  EXPECT_EQ(a.sentence_of, (std::vector<std::size_t>{0, 0, 0, 1, 1}));
}

TEST(Prepare, TruncatedTokensAreExcludedButSentenceLabelIsKept) {
  Corpus c;
  c.documents.emplace("d", Document("d", U"a b c d e"));
  c.gold["d"] = {"d", {Fragment(8, 9, kL)}};  // on the dropped token "e"
  ToyEmbedding toy(4, 0);
  std::vector<std::string> ids = {"d"};
  PreparedSplit p = prepare_split(c, ids, toy, 3);
  ASSERT_EQ(p.examples.size(), 1u);
  EXPECT_EQ(p.examples[0].tokens.size(), 3u);
  EXPECT_EQ(p.examples[0].example.embeddings.rows(), 4);
  EXPECT_EQ(p.examples[0].example.targets.token_classes, std::vector<int>(3, kNoneClass));
  EXPECT_TRUE(p.examples[0].example.targets.sentence_positive);
  EXPECT_EQ(p.truncated_tokens, 2u);
}

TEST(Evaluate, PerfectOraclePredictorScoresOne) {
  Corpus c = make_synthetic_corpus({});
  std::vector<std::string> ids = c.ids_in(Split::kTest);
  Predictions perfect;
  for (const auto &id : ids) {
    perfect.fragments[id] = c.gold_for(id);
    auto labels = sentence_labels(c.document(id), c.gold_for(id));
    for (std::size_t i = 0; i < labels.size(); ++i) perfect.sentences[{id, i}] = labels[i];
  }
  TaskScores s = evaluate(perfect, c, ids);
  EXPECT_DOUBLE_EQ(s.flc_full.f1, 1.0);
  EXPECT_DOUBLE_EQ(s.flc_spans.f1, 1.0);
  EXPECT_DOUBLE_EQ(s.slc.f1, 1.0);
}

TEST(Baseline, AllPropagandaPrecisionIsThePositiveRate) {
  Corpus c = make_synthetic_corpus({});
  std::vector<std::string> ids = c.ids_in(Split::kTest);
  auto labels = gold_sentence_labels(c, ids);
  std::size_t pos = std::count(labels.begin(), labels.end(), true);
  ScoreReport r = all_propaganda_baseline(c, ids);
  EXPECT_DOUBLE_EQ(r.precision, static_cast<double>(pos) / labels.size());
  EXPECT_DOUBLE_EQ(r.recall, 1.0);
}

TEST(PositiveWeight, NegativesOverPositives) {
  std::vector<SentenceExample> ex(5);
  ex[0].example.targets.sentence_positive = true;
  EXPECT_DOUBLE_EQ(positive_class_weight(ex), 4.0);
  ex[0].example.targets.sentence_positive = false;
  EXPECT_DOUBLE_EQ(positive_class_weight(ex), 1.0);
}

ExperimentConfig toy_config() {
  ExperimentConfig c;
  c.seeds = {1, 2};
  c.learning_rate = 0.1;
  c.max_epochs = 15;
  c.batch_size = 8;
  c.embedding_dim = 48;
  return c;
}

TEST(Experiment, DeterministicAndMeanOverSeeds) {
  Corpus c = make_synthetic_corpus({});
  ExperimentConfig cfg = toy_config();
  cfg.architecture = Architecture::kMgn;
  cfg.gate = GateActivation::kRelu;
  testing::TempDir d1, d2;
  ExperimentResult a = run_experiment(cfg, c, d1.path());
  ExperimentResult b = run_experiment(cfg, c, d2.path());
  for (const char *f : {"scores.json", "config.cfg", "seed-1/predictions.tsv",
                        "seed-2/model.ckpt", "seed-1/train_log.tsv",
                        "seed-2/predictions.slc.tsv"}) {
    EXPECT_EQ(testing::read_text(d1 / std::string(f)), testing::read_text(d2 / std::string(f))) << f;
  }
  ASSERT_EQ(a.runs.size(), 2u);
  EXPECT_DOUBLE_EQ(a.mean.flc_full.f1, (a.runs[0].test.flc_full.f1 + a.runs[1].test.flc_full.f1) / 2);
  EXPECT_DOUBLE_EQ(a.mean.slc.precision,
                   (a.runs[0].test.slc.precision + a.runs[1].test.slc.precision) / 2);
  EXPECT_EQ(a.mean.flc_full.f1, b.mean.flc_full.f1);
}

TEST(Experiment, MissingSplitIsAnError) {
  Corpus c = make_synthetic_corpus({});
  c.split.clear();
  EXPECT_THROW(run_experiment(toy_config(), c), Error);
}

// Trigger words are labeled in positive sentences and appear unlabeled in
// negative ones; only a cue word outside the fragments tells them apart at
// the sentence level. A token-only head cannot separate the two uses, so
// the gated model may only match or beat it.
Corpus ambiguous_corpus() {
  Corpus c;
  std::mt19937_64 rng(31);
  const char *filler[] = {"river", "table", "green", "seven", "cloud", "stone", "paper"};
  for (int a = 0; a < 24; ++a) {
    std::string id = "a" + std::to_string(a);
    std::u32string text;
    AnnotationSet gold{id, {}};
    for (int s = 0; s < 6; ++s) {
      const bool positive = (a + s) % 3 == 0;
      std::string line = positive ? "shocking" : "calm";
      for (int w = 0; w < 4; ++w) line += std::string(" ") + filler[rng() % 7];
      const std::size_t at = text.size() + line.size() + 1;
      line += " disaster";
      if (positive) gold.fragments.emplace_back(at, at + 8, kL);
      text += utf8_decode(line) + U"\n";
    }
    c.documents.emplace(id, Document(id, text));
    c.gold[id] = gold;
    c.split[id] = a < 16 ? Split::kTrain : a < 20 ? Split::kDev : Split::kTest;
  }
  return c;
}

TEST(Experiment, GatedModelIsAtLeastAsPreciseAsTokenOnlyBaseline) {
  const Corpus c = ambiguous_corpus();
  ExperimentConfig cfg = toy_config();
  cfg.seeds = {1, 2, 3};
  cfg.max_epochs = 40;
  cfg.patience = 40;
  cfg.architecture = Architecture::kBertSingle;
  const double single = run_experiment(cfg, c).mean.flc_full.precision;
  cfg.architecture = Architecture::kMgn;
  for (auto gate : {GateActivation::kRelu, GateActivation::kSigmoid}) {
    cfg.gate = gate;
    const double mgn = run_experiment(cfg, c).mean.flc_full.precision;
    EXPECT_GE(mgn, single) << gate_activation_name(gate);
  }
}

}  // namespace
}  // namespace fgprop
