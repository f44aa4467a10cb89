#include "fgprop/metric.h"

#include <algorithm>
#include <array>
#include <cstdio>
#include <memory>
#include <set>

#include "fgprop/error.h"

namespace fgprop {
namespace {

struct CreditSums {
  double precision_credit = 0.0;  // Σ C(s, t, |s|)
  double recall_credit = 0.0;     // Σ C(s, t, |t|)
  std::size_t predicted = 0;
  std::size_t gold = 0;
};

void accumulate(const std::vector<Fragment> &predicted,
                const std::vector<Fragment> &gold, MatchMode mode,
                const LabelSimilarity &similarity, CreditSums &sums) {
  sums.predicted += predicted.size();
  sums.gold += gold.size();
  for (const auto &s : predicted) {
    for (const auto &t : gold) {
      const std::size_t shared = shared_characters(s, t);
      if (shared == 0) continue;
      const double agree =
          mode == MatchMode::kSpansOnly ? 1.0 : similarity(s.technique(), t.technique());
      if (agree == 0.0) continue;
      sums.precision_credit +=
          static_cast<double>(shared) / static_cast<double>(s.length()) * agree;
      sums.recall_credit +=
          static_cast<double>(shared) / static_cast<double>(t.length()) * agree;
    }
  }
}

const std::vector<Fragment> &fragments_of(const Annotations &a,
                                          const std::string &id) {
  static const std::vector<Fragment> kEmpty;
  auto it = a.find(id);
  return it == a.end() ? kEmpty : it->second.fragments;
}

CreditSums credit_sums(const Annotations &predicted, const Annotations &gold,
                       MatchMode mode, const LabelSimilarity &similarity,
                       std::optional<Technique> only = std::nullopt) {
  std::set<std::string> ids;
  for (const auto &[id, set] : predicted) ids.insert(id);
  for (const auto &[id, set] : gold) ids.insert(id);
  CreditSums sums;
  std::vector<Fragment> s_buf, t_buf;
  for (const auto &id : ids) {
    const auto &s = fragments_of(predicted, id);
    const auto &t = fragments_of(gold, id);
    if (!only) {
      accumulate(s, t, mode, similarity, sums);
      continue;
    }
    s_buf.clear();
    t_buf.clear();
    std::copy_if(s.begin(), s.end(), std::back_inserter(s_buf),
                 [&](const Fragment &f) { return f.technique() == *only; });
    std::copy_if(t.begin(), t.end(), std::back_inserter(t_buf),
                 [&](const Fragment &f) { return f.technique() == *only; });
    accumulate(s_buf, t_buf, mode, similarity, sums);
  }
  return sums;
}

ScoreReport report_from(const CreditSums &sums) {
  ScoreReport r;
  r.predicted = sums.predicted;
  r.gold = sums.gold;
  r.precision = sums.predicted == 0
                    ? 0.0
                    : sums.precision_credit / static_cast<double>(sums.predicted);
  r.recall = sums.gold == 0
                 ? 0.0
                 : sums.recall_credit / static_cast<double>(sums.gold);
  r.f1 = harmonic_mean(r.precision, r.recall);
  r.exceeds_unit = r.precision > 1.0 || r.recall > 1.0;
  return r;
}

Annotations single(const AnnotationSet &set) { return {{set.doc_id, set}}; }

void require_same_document(const AnnotationSet &a, const AnnotationSet &b) {
  if (a.doc_id != b.doc_id) {
    throw Error("cannot pair fragments of documents " + a.doc_id + " and " +
                b.doc_id);
  }
}

std::string percent(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * x);
  return buf;
}

}  // namespace

std::string_view match_mode_name(MatchMode mode) {
  return mode == MatchMode::kFullTask ? "full_task" : "spans_only";
}

double strict_label_similarity(Technique a, Technique b) {
  return a == b ? 1.0 : 0.0;
}

double overlap_credit(const Fragment &s, const Fragment &t, std::size_t h,
                      MatchMode mode, const LabelSimilarity &similarity) {
  if (h == 0) throw Error("overlap_credit: normalizer must be at least 1");
  const double agree =
      mode == MatchMode::kSpansOnly ? 1.0 : similarity(s.technique(), t.technique());
  return static_cast<double>(shared_characters(s, t)) /
         static_cast<double>(h) * agree;
}

double harmonic_mean(double p, double r) {
  if (p <= 0.0 || r <= 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

double precision(const Annotations &predicted, const Annotations &gold,
                 MatchMode mode, const LabelSimilarity &similarity) {
  return report_from(credit_sums(predicted, gold, mode, similarity)).precision;
}

double recall(const Annotations &predicted, const Annotations &gold,
              MatchMode mode, const LabelSimilarity &similarity) {
  return report_from(credit_sums(predicted, gold, mode, similarity)).recall;
}

double precision(const AnnotationSet &predicted, const AnnotationSet &gold,
                 MatchMode mode) {
  require_same_document(predicted, gold);
  return precision(single(predicted), single(gold), mode);
}

double recall(const AnnotationSet &predicted, const AnnotationSet &gold,
              MatchMode mode) {
  require_same_document(predicted, gold);
  return recall(single(predicted), single(gold), mode);
}

ScoreReport score(const Annotations &predicted, const Annotations &gold,
                  const ScoreOptions &options) {
  ScoreReport report = report_from(
      credit_sums(predicted, gold, options.mode, options.similarity));
  if (options.per_technique) {
    std::array<bool, kNumTechniques> present{};
    for (const auto *a : {&predicted, &gold}) {
      for (const auto &[id, set] : *a) {
        for (const auto &f : set.fragments) {
          present[technique_index(f.technique())] = true;
        }
      }
    }
    for (Technique t : all_techniques()) {
      if (!present[technique_index(t)]) continue;
      report.per_technique.push_back(
          {t, report_from(credit_sums(predicted, gold, options.mode,
                                      options.similarity, t))});
    }
  }
  return report;
}

ScoreReport f1(const AnnotationSet &predicted, const AnnotationSet &gold,
               MatchMode mode) {
  require_same_document(predicted, gold);
  ScoreOptions options;
  options.mode = mode;
  return score(single(predicted), single(gold), options);
}

ScoreReport slc_metrics(std::span<const bool> predicted,
                        std::span<const bool> gold) {
  if (predicted.size() != gold.size()) {
    throw Error("sentence label sequences differ in length: " +
                std::to_string(predicted.size()) + " predicted vs " +
                std::to_string(gold.size()) + " gold");
  }
  std::size_t tp = 0, pred_pos = 0, gold_pos = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    pred_pos += predicted[i];
    gold_pos += gold[i];
    tp += predicted[i] && gold[i];
  }
  ScoreReport r;
  r.predicted = pred_pos;
  r.gold = gold_pos;
  r.true_positives = tp;
  r.precision = pred_pos ? static_cast<double>(tp) / static_cast<double>(pred_pos) : 0.0;
  r.recall = gold_pos ? static_cast<double>(tp) / static_cast<double>(gold_pos) : 0.0;
  r.f1 = harmonic_mean(r.precision, r.recall);
  return r;
}

ScoreReport slc_metrics(const std::vector<bool> &predicted,
                        const std::vector<bool> &gold) {
  // std::vector<bool> is bit-packed; copy into plain bool arrays.
  auto p = std::make_unique<bool[]>(predicted.size());
  auto g = std::make_unique<bool[]>(gold.size());
  std::copy(predicted.begin(), predicted.end(), p.get());
  std::copy(gold.begin(), gold.end(), g.get());
  return slc_metrics(std::span<const bool>(p.get(), predicted.size()),
                     std::span<const bool>(g.get(), gold.size()));
}

std::string format_prf(const ScoreReport &report) {
  return "P " + percent(report.precision) + " R " + percent(report.recall) +
         " F1 " + percent(report.f1);
}

nlohmann::json to_json(const ScoreReport &report) {
  nlohmann::json j = {{"precision", report.precision},
                      {"recall", report.recall},
                      {"f1", report.f1},
                      {"predicted", report.predicted},
                      {"gold", report.gold},
                      {"exceeds_unit", report.exceeds_unit}};
  if (report.true_positives) j["true_positives"] = *report.true_positives;
  if (!report.per_technique.empty()) {
    nlohmann::json per = nlohmann::json::object();
    for (const auto &pt : report.per_technique) {
      per[std::string(technique_id(pt.technique))] = to_json(pt.report);
    }
    j["per_technique"] = per;
  }
  return j;
}

}  // namespace fgprop
