#include "fgprop/pipeline.h"

#include <cstdio>
#include <fstream>
#include <tuple>

#include "fgprop/checkpoint.h"
#include "fgprop/error.h"
#include "fgprop/parallel.h"
#include "fgprop/stats.h"

namespace fgprop {
namespace {

void check_alignment(const TokenAlignment &a) {
  if (a.sentence_of.size() != a.tokens.size()) {
    throw Error("alignment of " + a.doc_id + " has mismatched sentence tags");
  }
}

std::string fmt(const char *format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

ScoreReport mean_report(std::span<const ScoreReport *const> reports) {
  ScoreReport out;
  if (reports.empty()) return out;
  for (const ScoreReport *r : reports) {
    out.precision += r->precision;
    out.recall += r->recall;
    out.f1 += r->f1;
    out.exceeds_unit = out.exceeds_unit || r->exceeds_unit;
  }
  const double n = static_cast<double>(reports.size());
  out.precision /= n;
  out.recall /= n;
  out.f1 /= n;
  out.predicted = reports.front()->predicted;
  out.gold = reports.front()->gold;
  return out;
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("error writing " + path.string());
}

std::string train_log_tsv(const TrainResult &r) {
  std::string s = "epoch\tloss\tsentence_loss\ttoken_loss\tlearning_rate\tdev_f1\n";
  for (const EpochLog &e : r.log) {
    s += std::to_string(e.epoch) + '\t' + fmt("%.10g", e.loss) + '\t' +
         fmt("%.10g", e.sentence_loss) + '\t' + fmt("%.10g", e.token_loss) +
         '\t' + fmt("%.10g", e.learning_rate) + '\t' +
         (e.validation_f1 ? fmt("%.10g", *e.validation_f1) : std::string("-")) +
         '\n';
  }
  return s;
}

}  // namespace

TokenAlignment align_document(const Document &doc,
                              const EmbeddingProvider &embedding,
                              std::size_t max_tokens, std::size_t *truncated) {
  TokenAlignment a;
  a.doc_id = doc.id();
  for (const SentenceSpan &s : doc.sentences()) {
    std::vector<Token> toks = embedding.tokenize(doc, s);
    if (toks.size() > max_tokens) {
      if (truncated) *truncated += toks.size() - max_tokens;
      toks.resize(max_tokens);
    }
    for (const Token &t : toks) {
      a.tokens.push_back(t);
      a.sentence_of.push_back(s.index);
    }
  }
  return a;
}

std::vector<int> project_gold_to_tokens(const AnnotationSet &gold,
                                        const TokenAlignment &alignment) {
  std::vector<int> classes(alignment.size(), kNoneClass);
  for (std::size_t i = 0; i < alignment.size(); ++i) {
    const Token &tok = alignment.tokens[i];
    const Fragment *best = nullptr;
    for (const Fragment &f : gold.fragments) {
      if (shared_characters(tok.begin, tok.end, f.begin(), f.end()) == 0) continue;
      auto key = [](const Fragment &x) {
        return std::make_tuple(x.begin(), -static_cast<long long>(x.length()),
                               technique_index(x.technique()));
      };
      if (!best || key(f) < key(*best)) best = &f;
    }
    if (best) classes[i] = token_class(best->technique());
  }
  return classes;
}

AnnotationSet decode_fragments(std::span<const int> classes,
                               const TokenAlignment &alignment) {
  check_alignment(alignment);
  if (classes.size() != alignment.size()) {
    throw Error("decode needs one class per token: got " +
                std::to_string(classes.size()) + " for " +
                std::to_string(alignment.size()) + " tokens");
  }
  AnnotationSet out;
  out.doc_id = alignment.doc_id;
  std::size_t i = 0;
  while (i < classes.size()) {
    const int c = classes[i];
    if (c < 0 || c >= static_cast<int>(kNumTokenClasses)) {
      throw Error("token class " + std::to_string(c) + " is out of range");
    }
    if (c == kNoneClass) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < classes.size() && classes[j] == c &&
           alignment.sentence_of[j] == alignment.sentence_of[i]) {
      ++j;
    }
    out.fragments.emplace_back(alignment.tokens[i].begin,
                               alignment.tokens[j - 1].end,
                               technique_from_class(c));
    i = j;
  }
  return out;
}

PreparedSplit prepare_split(const Corpus &corpus,
                            std::span<const std::string> ids,
                            const EmbeddingProvider &embedding,
                            std::size_t max_tokens) {
  PreparedSplit out;
  out.ids.assign(ids.begin(), ids.end());
  std::vector<std::vector<SentenceExample>> per_doc(ids.size());
  std::vector<std::size_t> truncated(ids.size(), 0);
  parallel_for(ids.size(), [&](std::size_t d) {
    const Document &doc = corpus.document(ids[d]);
    const AnnotationSet &gold = corpus.gold_for(ids[d]);
    for (const SentenceSpan &s : doc.sentences()) {
      std::vector<Token> toks = embedding.tokenize(doc, s);
      if (toks.size() > max_tokens) {
        truncated[d] += toks.size() - max_tokens;
        toks.resize(max_tokens);
      }
      if (toks.empty()) continue;
      SentenceExample ex;
      ex.doc_id = doc.id();
      ex.sentence = s.index;
      ex.example.embeddings = embedding.lookup(doc, s, toks);
      check_embedding_matrix(ex.example.embeddings, toks.size(),
                             embedding.dimension());
      TokenAlignment a{doc.id(), toks, std::vector<std::size_t>(toks.size(), s.index)};
      ex.example.targets.sentence_positive = sentence_label(doc, gold, s.index);
      ex.example.targets.token_classes = project_gold_to_tokens(gold, a);
      ex.tokens = std::move(toks);
      per_doc[d].push_back(std::move(ex));
    }
  });
  for (std::size_t d = 0; d < ids.size(); ++d) {
    out.sentences += corpus.document(ids[d]).sentences().size();
    out.truncated_tokens += truncated[d];
    for (auto &ex : per_doc[d]) out.examples.push_back(std::move(ex));
  }
  return out;
}

Predictions predict(const MgnModel &model, const PreparedSplit &split,
                    const Corpus &corpus) {
  const auto &examples = split.examples;
  std::vector<ForwardResult> results(examples.size());
  parallel_for(examples.size(), [&](std::size_t i) {
    results[i] = forward(model, examples[i].example.embeddings);
  });

  Predictions out;
  std::map<std::string, TokenAlignment> alignments;
  std::map<std::string, std::vector<int>> classes;
  for (const std::string &id : split.ids) {
    out.fragments[id].doc_id = id;
    alignments[id].doc_id = id;
    classes[id];
    for (const SentenceSpan &s : corpus.document(id).sentences()) {
      out.sentences[{id, s.index}] = false;
    }
  }
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const SentenceExample &ex = examples[i];
    out.sentences[{ex.doc_id, ex.sentence}] = results[i].sentence_positive();
    TokenAlignment &a = alignments.at(ex.doc_id);
    std::vector<int> &c = classes.at(ex.doc_id);
    const std::vector<int> predicted = results[i].token_classes();
    for (std::size_t t = 0; t < ex.tokens.size(); ++t) {
      a.tokens.push_back(ex.tokens[t]);
      a.sentence_of.push_back(ex.sentence);
      c.push_back(predicted[t]);
    }
  }
  for (const std::string &id : split.ids) {
    out.fragments[id] = decode_fragments(classes.at(id), alignments.at(id));
  }
  return out;
}

std::vector<bool> gold_sentence_labels(const Corpus &corpus,
                                       std::span<const std::string> ids) {
  std::vector<bool> labels;
  for (const std::string &id : ids) {
    for (bool b : sentence_labels(corpus.document(id), corpus.gold_for(id))) {
      labels.push_back(b);
    }
  }
  return labels;
}

TaskScores evaluate(const Predictions &predictions, const Corpus &corpus,
                    std::span<const std::string> ids) {
  Annotations gold;
  Annotations predicted;
  std::vector<bool> slc_pred;
  for (const std::string &id : ids) {
    gold[id] = corpus.gold_for(id);
    auto it = predictions.fragments.find(id);
    predicted[id] = it != predictions.fragments.end() ? it->second
                                                      : AnnotationSet{id, {}};
    for (const SentenceSpan &s : corpus.document(id).sentences()) {
      auto p = predictions.sentences.find({id, s.index});
      slc_pred.push_back(p != predictions.sentences.end() && p->second);
    }
  }
  TaskScores scores;
  scores.flc_full = score(predicted, gold, {.mode = MatchMode::kFullTask});
  scores.flc_spans = score(predicted, gold, {.mode = MatchMode::kSpansOnly});
  scores.slc = slc_metrics(slc_pred, gold_sentence_labels(corpus, ids));
  return scores;
}

ScoreReport all_propaganda_baseline(const Corpus &corpus,
                                    std::span<const std::string> ids) {
  const std::vector<bool> gold = gold_sentence_labels(corpus, ids);
  return slc_metrics(std::vector<bool>(gold.size(), true), gold);
}

double positive_class_weight(std::span<const SentenceExample> examples) {
  std::size_t pos = 0;
  for (const auto &ex : examples) pos += ex.example.targets.sentence_positive;
  if (pos == 0) return 1.0;
  return static_cast<double>(examples.size() - pos) / static_cast<double>(pos);
}

std::unique_ptr<EmbeddingProvider> make_embedding(const ExperimentConfig &config) {
  if (config.embedding == EmbeddingKind::kToy) {
    return std::make_unique<ToyEmbedding>(config.embedding_dim,
                                          config.embedding_seed);
  }
  return std::make_unique<FileEmbedding>(read_embedding_file(config.embedding_file),
                                         config.embedding_file.string());
}

TaskScores mean_scores(std::span<const TaskScores> scores) {
  std::vector<const ScoreReport *> full, spans, slc;
  for (const TaskScores &s : scores) {
    full.push_back(&s.flc_full);
    spans.push_back(&s.flc_spans);
    slc.push_back(&s.slc);
  }
  return {mean_report(full), mean_report(spans), mean_report(slc)};
}

nlohmann::json to_json(const TaskScores &scores) {
  return {{"flc_full", to_json(scores.flc_full)},
          {"flc_spans", to_json(scores.flc_spans)},
          {"slc", to_json(scores.slc)}};
}

ExperimentResult run_experiment(const ExperimentConfig &config,
                                const Corpus &corpus,
                                const std::optional<std::filesystem::path> &run_dir) {
  config.validate();
  verify_split(corpus);
  const auto embedding = make_embedding(config);
  const std::vector<std::string> train_ids = corpus.ids_in(Split::kTrain);
  const std::vector<std::string> dev_ids = corpus.ids_in(Split::kDev);
  const std::vector<std::string> test_ids = corpus.ids_in(Split::kTest);
  const PreparedSplit train_set =
      prepare_split(corpus, train_ids, *embedding, config.max_seq_length);
  const PreparedSplit dev_set =
      prepare_split(corpus, dev_ids, *embedding, config.max_seq_length);
  const PreparedSplit test_set =
      prepare_split(corpus, test_ids, *embedding, config.max_seq_length);
  if (train_set.examples.empty()) throw Error("training split has no sentences");

  ExperimentResult result;
  result.alpha = config.resolved_alpha();
  result.positive_weight = config.positive_weight
                               ? *config.positive_weight
                               : positive_class_weight(train_set.examples);
  std::vector<Example> train_examples;
  train_examples.reserve(train_set.examples.size());
  for (const auto &ex : train_set.examples) train_examples.push_back(ex.example);

  result.runs.resize(config.seeds.size());
  parallel_for(config.seeds.size(), [&](std::size_t k) {
    const std::uint64_t seed = config.seeds[k];
    ModelConfig mc;
    mc.architecture = config.architecture;
    mc.gate = config.gate;
    mc.dimension = embedding->dimension();
    mc.alpha = result.alpha;
    mc.positive_weight = result.positive_weight;
    mc.seed = seed;
    TrainConfig tc;
    tc.adam.learning_rate = config.learning_rate;
    tc.adam.weight_decay = config.weight_decay;
    tc.adam.warmup_proportion = config.warmup_proportion;
    tc.batch_size = config.batch_size;
    tc.max_epochs = config.max_epochs;
    tc.patience = config.patience;
    tc.seed = seed;
    Validator validate;
    if (!dev_set.ids.empty()) {
      validate = [&](const MgnModel &m) {
        TaskScores s = evaluate(predict(m, dev_set, corpus), corpus, dev_set.ids);
        return config.task == Task::kFlc ? s.flc_full.f1 : s.slc.f1;
      };
    }
    SeedRun &run = result.runs[k];
    run.seed = seed;
    run.training = train(MgnModel::create(mc), train_examples, tc, validate);
    run.dev = evaluate(predict(run.training.model, dev_set, corpus), corpus, dev_set.ids);
    run.test_predictions = predict(run.training.model, test_set, corpus);
    run.test = evaluate(run.test_predictions, corpus, test_set.ids);
  });
  std::vector<TaskScores> tests;
  for (const auto &r : result.runs) tests.push_back(r.test);
  result.mean = mean_scores(tests);

  if (!run_dir) return result;
  std::filesystem::create_directories(*run_dir);
  write_text(*run_dir / "config.cfg", config.to_text());
  nlohmann::json summary = {
      {"task", std::string(task_name(config.task))},
      {"architecture", std::string(architecture_name(config.architecture))},
      {"gate", std::string(gate_activation_name(config.gate))},
      {"alpha", result.alpha},
      {"positive_weight", result.positive_weight},
      {"truncated_tokens",
       train_set.truncated_tokens + dev_set.truncated_tokens + test_set.truncated_tokens},
      {"seeds", nlohmann::json::array()},
      {"mean", to_json(result.mean)},
  };
  for (const SeedRun &run : result.runs) {
    const auto dir = *run_dir / ("seed-" + std::to_string(run.seed));
    std::filesystem::create_directories(dir);
    Checkpoint ckpt{run.training.model,
                    {{"embedding", embedding->describe()},
                     {"max_seq_length", config.max_seq_length},
                     {"task", std::string(task_name(config.task))}}};
    save_checkpoint(dir / "model.ckpt", ckpt);
    {
      std::ofstream out(dir / "predictions.tsv", std::ios::binary);
      write_annotations(out, run.test_predictions.fragments);
    }
    {
      std::ofstream out(dir / "predictions.slc.tsv", std::ios::binary);
      write_sentence_labels(out, run.test_predictions.sentences);
    }
    write_text(dir / "train_log.tsv", train_log_tsv(run.training));
    nlohmann::json seed_json = {
        {"seed", run.seed},
        {"best_epoch", run.training.best_epoch},
        {"epochs", run.training.log.size()},
        {"stopped_early", run.training.stopped_early},
        {"dev", to_json(run.dev)},
        {"test", to_json(run.test)},
    };
    write_text(dir / "scores.json", seed_json.dump(2) + "\n");
    summary["seeds"].push_back(seed_json);
  }
  write_text(*run_dir / "scores.json", summary.dump(2) + "\n");
  return result;
}

std::string format_experiment_table(const nlohmann::json &scores) {
  auto prf = [](const nlohmann::json &r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%6.2f %6.2f %6.2f",
                  100.0 * r.at("precision").get<double>(),
                  100.0 * r.at("recall").get<double>(),
                  100.0 * r.at("f1").get<double>());
    return std::string(buf);
  };
  auto row = [&](const std::string &label, const nlohmann::json &t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%-8s", label.c_str());
    return std::string(buf) + "  " + prf(t.at("flc_spans")) + "   " +
           prf(t.at("flc_full")) + "   " + prf(t.at("slc")) + "\n";
  };
  std::string out =
      "          FLC spans              FLC full               SLC\n"
      "run          P      R     F1        P      R     F1        P      R     F1\n";
  for (const auto &s : scores.at("seeds")) {
    out += row("seed " + std::to_string(s.at("seed").get<std::uint64_t>()),
               s.at("test"));
  }
  out += row("mean", scores.at("mean"));
  return out;
}

}  // namespace fgprop
