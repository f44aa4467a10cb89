#include "fgprop/stats.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "fgprop/error.h"

namespace fgprop {
namespace {

struct Moments {
  std::size_t n = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double x) {
    ++n;
    sum += x;
    sum_sq += x * x;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  // Population standard deviation.
  double sd() const {
    if (n == 0) return 0.0;
    double m = mean();
    double var = sum_sq / static_cast<double>(n) - m * m;
    return var > 0 ? std::sqrt(var) : 0.0;
  }
};

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' ||
         c == U'\v' || c == 0x00A0 || c == 0x2009 || c == 0x200A ||
         c == 0x3000;
}

ArticleGroupStats group_stats(const std::vector<const Document *> &docs) {
  ArticleGroupStats g;
  g.articles = docs.size();
  if (docs.empty()) return g;
  double lines = 0, sentences = 0, words = 0, chars = 0;
  for (const Document *d : docs) {
    lines += static_cast<double>(count_lines(d->text()));
    sentences += static_cast<double>(d->sentences().size());
    words += static_cast<double>(count_words(d->text()));
    chars += static_cast<double>(d->length());
  }
  const double n = static_cast<double>(docs.size());
  g.avg_lines = lines / n;
  g.avg_nonblank_lines = sentences / n;
  g.avg_words = words / n;
  g.avg_chars = chars / n;
  return g;
}

std::string fixed2(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

nlohmann::json group_json(const ArticleGroupStats &g) {
  return {{"articles", g.articles},
          {"avg_lines", g.avg_lines},
          {"avg_nonblank_lines", g.avg_nonblank_lines},
          {"avg_words", g.avg_words},
          {"avg_chars", g.avg_chars}};
}

nlohmann::json split_counts_json(const SplitCounts &c) {
  return {{"articles", c.articles},
          {"sentences", c.sentences},
          {"lines", c.lines},
          {"positive_sentences", c.positive_sentences}};
}

}  // namespace

std::size_t count_lines(std::u32string_view text) {
  if (text.empty()) return 0;
  std::size_t n = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    ++n;
    while (i < text.size() && text[i] != U'\n') ++i;
    if (i < text.size()) ++i;
  }
  return n;
}

std::size_t count_words(std::u32string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (char32_t c : text) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++n;
    }
  }
  return n;
}

CorpusStats compute_stats(const Corpus &corpus) {
  if (corpus.empty()) throw Error("cannot compute statistics of an empty corpus");
  CorpusStats stats;

  std::vector<const Document *> all, prop, nonprop;
  for (const auto &[id, doc] : corpus.documents) {
    all.push_back(&doc);
    auto src = corpus.sources.find(id);
    if (src != corpus.sources.end()) {
      (src->second == SourceKind::kPropagandistic ? prop : nonprop)
          .push_back(&doc);
    }
  }
  stats.all = group_stats(all);
  if (!corpus.sources.empty()) {
    stats.propagandistic = group_stats(prop);
    stats.non_propagandistic = group_stats(nonprop);
  }

  std::array<Moments, kNumTechniques> per_technique{};
  Moments overall;
  for (const auto &[id, set] : corpus.gold) {
    for (const auto &f : set.fragments) {
      per_technique[technique_index(f.technique())].add(
          static_cast<double>(f.length()));
      overall.add(static_cast<double>(f.length()));
    }
  }
  for (Technique t : all_techniques()) {
    const Moments &m = per_technique[technique_index(t)];
    stats.techniques.push_back({t, m.n, m.mean(), m.sd()});
  }
  std::stable_sort(stats.techniques.begin(), stats.techniques.end(),
                   [](const TechniqueStats &a, const TechniqueStats &b) {
                     return a.count > b.count;
                   });
  stats.total_instances = overall.n;
  stats.mean_length = overall.mean();
  stats.sd_length = overall.sd();

  for (const auto &[id, doc] : corpus.documents) {
    auto labels = sentence_labels(doc, corpus.gold_for(id));
    std::size_t positives =
        static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
    stats.sentences += labels.size();
    stats.lines += count_lines(doc.text());
    stats.sentences_with_technique += positives;

    auto sp = corpus.split.find(id);
    if (sp != corpus.split.end()) {
      SplitCounts &c = stats.splits[sp->second];
      ++c.articles;
      c.sentences += labels.size();
      c.lines += count_lines(doc.text());
      c.positive_sentences += positives;
    }
  }
  if (stats.sentences > 0) {
    stats.fraction_with_technique =
        static_cast<double>(stats.sentences_with_technique) /
        static_cast<double>(stats.sentences);
    stats.instances_per_sentence = static_cast<double>(stats.total_instances) /
                                   static_cast<double>(stats.sentences);
  }
  return stats;
}

nlohmann::json to_json(const CorpusStats &stats) {
  nlohmann::json j;
  j["articles"] = stats.all.articles;
  j["all"] = group_json(stats.all);
  if (stats.propagandistic) j["propagandistic"] = group_json(*stats.propagandistic);
  if (stats.non_propagandistic) {
    j["non_propagandistic"] = group_json(*stats.non_propagandistic);
  }
  j["total_instances"] = stats.total_instances;
  j["mean_length"] = stats.mean_length;
  j["sd_length"] = stats.sd_length;
  nlohmann::json techniques = nlohmann::json::array();
  for (const auto &t : stats.techniques) {
    techniques.push_back({{"id", technique_id(t.technique)},
                          {"name", technique_name(t.technique)},
                          {"count", t.count},
                          {"mean", t.mean_length},
                          {"sd", t.sd_length}});
  }
  j["techniques"] = techniques;
  j["sentences"] = stats.sentences;
  j["lines"] = stats.lines;
  j["sentences_with_technique"] = stats.sentences_with_technique;
  j["fraction_with_technique"] = stats.fraction_with_technique;
  j["instances_per_sentence"] = stats.instances_per_sentence;
  nlohmann::json splits = nlohmann::json::object();
  for (const auto &[s, c] : stats.splits) {
    splits[std::string(split_name(s))] = split_counts_json(c);
  }
  j["splits"] = splits;
  return j;
}

void write_tsv(std::ostream &out, const CorpusStats &stats) {
  out << "technique\tinstances\tmean_length\tsd_length\n";
  for (const auto &t : stats.techniques) {
    out << technique_id(t.technique) << '\t' << t.count << '\t'
        << fixed2(t.mean_length) << '\t' << fixed2(t.sd_length) << '\n';
  }
  out << "all\t" << stats.total_instances << '\t' << fixed2(stats.mean_length)
      << '\t' << fixed2(stats.sd_length) << '\n';
  out << '\n';
  out << "group\tarticles\tavg_lines\tavg_nonblank_lines\tavg_words\tavg_chars\n";
  auto group_row = [&](const char *name, const ArticleGroupStats &g) {
    out << name << '\t' << g.articles << '\t' << fixed2(g.avg_lines) << '\t'
        << fixed2(g.avg_nonblank_lines) << '\t' << fixed2(g.avg_words) << '\t'
        << fixed2(g.avg_chars) << '\n';
  };
  if (stats.propagandistic) group_row("prop", *stats.propagandistic);
  if (stats.non_propagandistic) group_row("nonprop", *stats.non_propagandistic);
  group_row("all", stats.all);
  out << '\n';
  out << "sentences\t" << stats.sentences << '\n';
  out << "lines\t" << stats.lines << '\n';
  out << "sentences_with_technique\t" << stats.sentences_with_technique << '\n';
  out << "fraction_with_technique\t"
      << fixed2(100.0 * stats.fraction_with_technique) << "%\n";
  if (!stats.splits.empty()) {
    out << '\n' << "split\tarticles\tsentences\tlines\tpositive_sentences\n";
    for (const auto &[s, c] : stats.splits) {
      out << split_name(s) << '\t' << c.articles << '\t' << c.sentences << '\t'
          << c.lines << '\t' << c.positive_sentences << '\n';
    }
  }
}

ExpectationReport check_expected(const CorpusStats &stats,
                                 const nlohmann::json &expected,
                                 double length_tolerance) {
  ExpectationReport report;
  auto count_check = [&](const std::string &what, std::size_t actual,
                         const nlohmann::json &want) {
    ++report.checks;
    auto w = want.get<std::size_t>();
    if (actual != w) {
      report.mismatches.push_back(what + ": count " + std::to_string(actual) +
                                  " != expected " + std::to_string(w));
    }
  };
  auto length_check = [&](const std::string &what, double actual,
                          const nlohmann::json &want) {
    ++report.checks;
    double w = want.get<double>();
    if (std::fabs(actual - w) > length_tolerance) {
      report.mismatches.push_back(what + ": " + fixed2(actual) +
                                  " differs from expected " + fixed2(w) +
                                  " by more than " + fixed2(length_tolerance));
    }
  };

  if (expected.contains("articles")) {
    count_check("articles", stats.all.articles, expected["articles"]);
  }
  if (expected.contains("total_instances")) {
    count_check("total instances", stats.total_instances,
                expected["total_instances"]);
  }
  if (expected.contains("all")) {
    const auto &a = expected["all"];
    if (a.contains("mean")) length_check("all mean length", stats.mean_length, a["mean"]);
    if (a.contains("sd")) length_check("all sd length", stats.sd_length, a["sd"]);
  }
  if (expected.contains("techniques")) {
    for (const auto &[id, want] : expected["techniques"].items()) {
      auto t = parse_technique(id);
      if (!t) {
        report.mismatches.push_back("expected file names unknown technique " +
                                    id);
        continue;
      }
      auto it = std::find_if(
          stats.techniques.begin(), stats.techniques.end(),
          [&](const TechniqueStats &s) { return s.technique == *t; });
      if (want.contains("count")) count_check(id, it->count, want["count"]);
      if (want.contains("mean")) length_check(id + " mean length", it->mean_length, want["mean"]);
      if (want.contains("sd")) length_check(id + " sd length", it->sd_length, want["sd"]);
    }
  }
  return report;
}

SplitReport verify_split(const Corpus &corpus, const nlohmann::json *expected) {
  if (!corpus.has_split()) throw Error("corpus has no split assignment");
  for (const auto &[id, s] : corpus.split) {
    if (!corpus.documents.count(id)) {
      throw Error("document " + id + " in " + std::string(split_name(s)) +
                  " split is absent from the corpus");
    }
  }
  SplitReport report;
  for (Split s : kAllSplits) report.counts[s] = {};
  for (const auto &[id, s] : corpus.split) {
    const Document &doc = corpus.document(id);
    auto labels = sentence_labels(doc, corpus.gold_for(id));
    SplitCounts &c = report.counts[s];
    ++c.articles;
    c.sentences += labels.size();
    c.lines += count_lines(doc.text());
    c.positive_sentences +=
        static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  }
  if (expected) {
    for (Split s : kAllSplits) {
      std::string name(split_name(s));
      if (!expected->contains(name)) continue;
      const auto &want = (*expected)[name];
      const SplitCounts &c = report.counts[s];
      if (want.contains("articles") &&
          want["articles"].get<std::size_t>() != c.articles) {
        report.mismatches.push_back(
            name + ": articles " + std::to_string(c.articles) +
            " != expected " + std::to_string(want["articles"].get<std::size_t>()));
      }
      if (want.contains("sentences") &&
          want["sentences"].get<std::size_t>() != c.sentences) {
        report.mismatches.push_back(
            name + ": sentences " + std::to_string(c.sentences) +
            " != expected " +
            std::to_string(want["sentences"].get<std::size_t>()));
      }
    }
  }
  return report;
}

nlohmann::json to_json(const SplitReport &report) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto &[s, c] : report.counts) {
    j[std::string(split_name(s))] = split_counts_json(c);
  }
  j["mismatches"] = report.mismatches;
  return j;
}

}  // namespace fgprop
