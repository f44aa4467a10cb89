#include "cli.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fgprop/checkpoint.h"
#include "fgprop/config.h"
#include "fgprop/corpus.h"
#include "fgprop/embedding.h"
#include "fgprop/embedding_file.h"
#include "fgprop/error.h"
#include "fgprop/metric.h"
#include "fgprop/pipeline.h"
#include "fgprop/stats.h"

namespace fgprop::cli {
namespace {

namespace fs = std::filesystem;

// An input problem the command already explained on stderr.
struct Failed {};

nlohmann::json read_json(const fs::path &path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception &e) {
    throw FormatError(path.string(), 0, e.what());
  }
}

void write_json(const fs::path &path, const nlohmann::json &j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

std::string fixed(double v, const char *format = "%.2f") {
  char buf[32];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

Corpus load_root(const fs::path &root) {
  if (!fs::is_directory(root)) throw Error("corpus directory " + root.string() + " does not exist");
  Corpus corpus = load_corpus(CorpusPaths::from_root(root));
  if (corpus.empty()) throw Error("no articles under " + root.string());
  return corpus;
}

// ---- validate -------------------------------------------------------------

struct ValidateArgs {
  std::string corpus;
  std::string embeddings;
};

int cmd_validate(const ValidateArgs &a, std::ostream &out, std::ostream &err) {
  const Corpus corpus = load_root(a.corpus);
  std::size_t sentences = 0;
  for (const auto &[id, doc] : corpus.documents) sentences += doc.sentences().size();
  out << corpus.documents.size() << " articles, " << total_fragments(corpus.gold)
      << " fragments, " << sentences << " sentences";
  if (corpus.has_split()) {
    const SplitReport split = verify_split(corpus);
    out << "; split";
    for (const auto &[s, c] : split.counts) out << ' ' << split_name(s) << '=' << c.articles;
  }
  out << '\n';
  if (!a.embeddings.empty()) {
    const EmbeddingFile file = read_embedding_file(a.embeddings);
    const auto problems = verify_embedding_file(file, corpus);
    for (const auto &p : problems) err << a.embeddings << ": " << p << '\n';
    if (!problems.empty()) throw Failed{};
    out << "embedding file: " << file.records.size() << " sentences, dimension "
        << file.dimension << ", encoder " << file.encoder << '\n';
  }
  return kExitOk;
}

// ---- stats ----------------------------------------------------------------

struct StatsArgs {
  std::string corpus;
  std::string expected;
  std::string json;
  std::string tsv;
  double tolerance = 0.5;
};

void print_group(std::ostream &out, const char *name, const ArticleGroupStats &g) {
  out << name << "\tarticles " << g.articles << "\tlines " << fixed(g.avg_lines)
      << " (nonblank " << fixed(g.avg_nonblank_lines) << ")\twords "
      << fixed(g.avg_words) << "\tchars " << fixed(g.avg_chars) << '\n';
}

int cmd_stats(const StatsArgs &a, std::ostream &out, std::ostream &err) {
  const Corpus corpus = load_root(a.corpus);
  const CorpusStats stats = compute_stats(corpus);
  print_group(out, "all", stats.all);
  if (stats.propagandistic) print_group(out, "prop", *stats.propagandistic);
  if (stats.non_propagandistic) print_group(out, "nonprop", *stats.non_propagandistic);
  out << "technique\tcount\tmean\tsd\n";
  for (const auto &t : stats.techniques) {
    out << technique_id(t.technique) << '\t' << t.count << '\t'
        << fixed(t.mean_length) << '\t' << fixed(t.sd_length) << '\n';
  }
  out << "all\t" << stats.total_instances << '\t' << fixed(stats.mean_length)
      << '\t' << fixed(stats.sd_length) << '\n';
  out << "sentences " << stats.sentences << ", with technique "
      << stats.sentences_with_technique << " (" << pct(stats.fraction_with_technique)
      << "%), instances per sentence " << fixed(stats.instances_per_sentence, "%.4f")
      << '\n';
  if (!a.json.empty()) write_json(a.json, to_json(stats));
  if (!a.tsv.empty()) {
    std::ofstream f(a.tsv, std::ios::binary);
    if (!f) throw Error("cannot write " + a.tsv);
    write_tsv(f, stats);
  }
  if (!a.expected.empty()) {
    const ExpectationReport rep = check_expected(stats, read_json(a.expected), a.tolerance);
    for (const auto &m : rep.mismatches) err << "mismatch: " << m << '\n';
    if (!rep.ok()) throw Failed{};
    out << "expected values: " << rep.checks << " checks passed\n";
  }
  return kExitOk;
}

// ---- score ----------------------------------------------------------------

struct ScoreArgs {
  std::string gold;
  std::string pred;
  std::string mode = "full";
  bool per_technique = false;
  std::string json;
  std::string articles;
};

int cmd_score(const ScoreArgs &a, std::ostream &out, std::ostream &) {
  ScoreReport report;
  if (a.mode == "slc") {
    const SentenceLabelMap pred = read_sentence_labels(a.pred);
    SentenceLabelMap gold;
    if (!a.articles.empty()) {
      // Gold sentence labels derived from gold fragments.
      CorpusPaths paths;
      paths.article_dir = a.articles;
      paths.annotation_dir = a.gold;
      const Corpus corpus = load_corpus(paths);
      for (const auto &[id, doc] : corpus.documents) {
        const auto labels = sentence_labels(doc, corpus.gold_for(id));
        for (std::size_t i = 0; i < labels.size(); ++i) gold[{id, i}] = labels[i];
      }
    } else {
      gold = read_sentence_labels(a.gold);
    }
    std::vector<bool> p, g;
    for (const auto &[key, label] : gold) {
      auto it = pred.find(key);
      if (it == pred.end()) {
        throw Error(a.pred + ": no prediction for sentence " + key.first + "/" +
                    std::to_string(key.second));
      }
      g.push_back(label);
      p.push_back(it->second);
    }
    for (const auto &[key, label] : pred) {
      if (!gold.count(key)) {
        throw Error(a.pred + ": sentence " + key.first + "/" +
                    std::to_string(key.second) + " has no gold label");
      }
    }
    report = slc_metrics(p, g);
  } else {
    Annotations gold = read_annotations(a.gold);
    const Annotations pred = read_annotations(a.pred);
    if (!a.articles.empty()) {
      CorpusPaths paths;
      paths.article_dir = a.articles;
      paths.annotation_dir = a.gold;
      const Corpus corpus = load_corpus(paths);
      for (const auto &[id, set] : pred) {
        auto doc = corpus.documents.find(id);
        if (doc == corpus.documents.end()) {
          throw Error(a.pred + ": prediction for unknown document " + id);
        }
        set.check_against(doc->second);
      }
      gold = corpus.gold;
    }
    ScoreOptions opts;
    opts.mode = a.mode == "spans" ? MatchMode::kSpansOnly : MatchMode::kFullTask;
    opts.per_technique = a.per_technique;
    report = score(pred, gold, opts);
  }
  out << format_prf(report) << '\n';
  if (report.exceeds_unit) {
    out << "note: overlapping same-label fragments push a score above 100\n";
  }
  for (const auto &pt : report.per_technique) {
    out << technique_id(pt.technique) << '\t' << format_prf(pt.report) << '\n';
  }
  if (!a.json.empty()) {
    nlohmann::json j = to_json(report);
    j["mode"] = a.mode;
    write_json(a.json, j);
  }
  return kExitOk;
}

// ---- split-check ----------------------------------------------------------

struct SplitArgs {
  std::string corpus;
  std::string expected;
  std::string json;
};

int cmd_split_check(const SplitArgs &a, std::ostream &out, std::ostream &err) {
  const Corpus corpus = load_root(a.corpus);
  nlohmann::json expected;
  if (!a.expected.empty()) expected = read_json(a.expected);
  const SplitReport rep = verify_split(corpus, a.expected.empty() ? nullptr : &expected);
  for (const auto &[s, c] : rep.counts) {
    out << split_name(s) << "\tarticles " << c.articles << "\tsentences "
        << c.sentences << "\tpositive " << c.positive_sentences << '\n';
  }
  if (!a.json.empty()) write_json(a.json, to_json(rep));
  for (const auto &m : rep.mismatches) err << "mismatch: " << m << '\n';
  if (!rep.ok()) throw Failed{};
  return kExitOk;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::string run_dir;
  std::string corpus;
  std::string seeds;
  std::vector<std::string> overrides;
};

int cmd_train(const TrainArgs &a, std::ostream &out, std::ostream &) {
  ExperimentConfig config = read_config(a.config);
  if (!a.corpus.empty()) config.corpus = a.corpus;
  if (!a.seeds.empty()) config.seeds = parse_seed_list(a.seeds);
  for (const auto &kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error("--set expects key=value, got '" + kv + "'");
    config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (config.corpus.empty()) throw Error("no corpus given (config key or --corpus)");
  const Corpus corpus = load_root(config.corpus);
  run_experiment(config, corpus, fs::path(a.run_dir));
  out << format_experiment_table(read_json(fs::path(a.run_dir) / "scores.json"));
  return kExitOk;
}

// ---- predict --------------------------------------------------------------

struct PredictArgs {
  std::string checkpoint;
  std::string corpus;
  std::string split = "test";
  std::string out;
  std::string slc_out;
};

int cmd_predict(const PredictArgs &a, std::ostream &out, std::ostream &) {
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  if (!ckpt.meta.contains("embedding")) {
    throw Error(a.checkpoint + ": checkpoint does not record its embedding");
  }
  const auto embedding = make_embedding(ckpt.meta.at("embedding"));
  if (embedding->dimension() != ckpt.model.config.dimension) {
    throw Error(a.checkpoint + ": embedding dimension does not match the model");
  }
  const std::size_t max_len = ckpt.meta.value("max_seq_length", std::size_t{210});
  const Corpus corpus = load_root(a.corpus);
  std::vector<std::string> ids;
  if (a.split == "all") {
    for (const auto &[id, doc] : corpus.documents) ids.push_back(id);
  } else {
    auto s = parse_split(a.split);
    if (!s) throw Error("unknown split '" + a.split + "'");
    verify_split(corpus);
    ids = corpus.ids_in(*s);
  }
  const PreparedSplit prepared = prepare_split(corpus, ids, *embedding, max_len);
  const Predictions pred = predict(ckpt.model, prepared, corpus);
  {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) throw Error("cannot write " + a.out);
    write_annotations(f, pred.fragments);
  }
  if (!a.slc_out.empty()) {
    std::ofstream f(a.slc_out, std::ios::binary);
    if (!f) throw Error("cannot write " + a.slc_out);
    write_sentence_labels(f, pred.sentences);
  }
  out << ids.size() << " articles, " << total_fragments(pred.fragments)
      << " predicted fragments\n";
  return kExitOk;
}

// ---- report ---------------------------------------------------------------

struct ReportArgs {
  std::string run_dir;
  bool json = false;
};

int cmd_report(const ReportArgs &a, std::ostream &out, std::ostream &) {
  const fs::path file = fs::path(a.run_dir) / "scores.json";
  if (!fs::exists(file)) throw Error(file.string() + " does not exist");
  const nlohmann::json scores = read_json(file);
  if (a.json) {
    out << scores.at("mean").dump(2) << '\n';
  } else {
    out << scores.value("architecture", "?") << " / " << scores.value("gate", "?")
        << ", task " << scores.value("task", "?") << ", alpha "
        << fixed(scores.value("alpha", 0.0)) << '\n';
    out << format_experiment_table(scores);
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Fine-grained propaganda corpus, scoring and model toolkit", "fgprop"};
  app.require_subcommand(1);

  ValidateArgs va;
  auto *validate = app.add_subcommand("validate", "Load and check a corpus");
  validate->add_option("--corpus", va.corpus, "Corpus root")->required();
  validate->add_option("--embeddings", va.embeddings, "Embedding file to verify");

  StatsArgs sa;
  auto *stats = app.add_subcommand("stats", "Corpus statistics");
  stats->add_option("--corpus", sa.corpus, "Corpus root")->required();
  stats->add_option("--expected", sa.expected, "Expected-values JSON");
  stats->add_option("--json", sa.json, "Write the report as JSON");
  stats->add_option("--tsv", sa.tsv, "Write the report as TSV");
  stats->add_option("--length-tolerance", sa.tolerance,
                    "Tolerance for length statistics")
      ->check(CLI::NonNegativeNumber);

  ScoreArgs ca;
  auto *scorecmd = app.add_subcommand("score", "Score predictions against gold");
  scorecmd->add_option("--gold", ca.gold, "Gold annotation file or directory")->required();
  scorecmd->add_option("--pred", ca.pred, "Prediction file")->required();
  scorecmd->add_option("--mode", ca.mode, "full, spans or slc")
      ->check(CLI::IsMember({"full", "spans", "slc"}));
  scorecmd->add_flag("--per-technique", ca.per_technique, "Per-technique rows");
  scorecmd->add_option("--json", ca.json, "Write the report as JSON");
  scorecmd->add_option("--articles", ca.articles,
                       "Article directory: bounds-check predictions; with "
                       "--mode slc, derive gold sentence labels");

  SplitArgs pa;
  auto *split = app.add_subcommand("split-check", "Per-split counts");
  split->add_option("--corpus", pa.corpus, "Corpus root")->required();
  split->add_option("--expected", pa.expected, "Expected-counts JSON");
  split->add_option("--json", pa.json, "Write the report as JSON");

  TrainArgs ta;
  auto *trn = app.add_subcommand("train", "Train and evaluate over seeds");
  trn->add_option("--config", ta.config, "Config file")->required();
  trn->add_option("--run-dir", ta.run_dir, "Output directory")->required();
  trn->add_option("--corpus", ta.corpus, "Corpus root (overrides the config)");
  trn->add_option("--seeds", ta.seeds, "Comma-separated seeds");
  trn->add_option("--set", ta.overrides, "Config override key=value");

  PredictArgs da;
  auto *pred = app.add_subcommand("predict", "Predict with a checkpoint");
  pred->add_option("--checkpoint", da.checkpoint, "model.ckpt")->required();
  pred->add_option("--corpus", da.corpus, "Corpus root")->required();
  pred->add_option("--split", da.split, "train, dev, test or all")
      ->check(CLI::IsMember({"train", "dev", "test", "all"}));
  pred->add_option("--out", da.out, "Fragment predictions TSV")->required();
  pred->add_option("--slc-out", da.slc_out, "Sentence predictions TSV");

  ReportArgs ra;
  auto *rep = app.add_subcommand("report", "Summarize a run directory");
  rep->add_option("--run-dir", ra.run_dir, "Run directory")->required();
  rep->add_flag("--json", ra.json, "Print the mean scores as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(va, out, err);
    if (*stats) return cmd_stats(sa, out, err);
    if (*scorecmd) return cmd_score(ca, out, err);
    if (*split) return cmd_split_check(pa, out, err);
    if (*trn) return cmd_train(ta, out, err);
    if (*pred) return cmd_predict(da, out, err);
    if (*rep) return cmd_report(ra, out, err);
  } catch (const Failed &) {
    return kExitInput;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitUsage;
}

}  // namespace fgprop::cli
