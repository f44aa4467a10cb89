#ifndef FGPROP_METRIC_H_
#define FGPROP_METRIC_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fgprop/span.h"

namespace fgprop {

// full_task requires label agreement; spans_only ignores labels.
enum class MatchMode { kFullTask, kSpansOnly };

std::string_view match_mode_name(MatchMode mode);

// Label agreement factor in [0, 1]. Strict equality unless replaced.
using LabelSimilarity = std::function<double(Technique, Technique)>;

double strict_label_similarity(Technique a, Technique b);

// Partial-overlap credit of a pair of fragments: |s ∩ t| / h scaled by label
// agreement (constant 1 in spans_only mode). h must be at least 1.
double overlap_credit(const Fragment &s, const Fragment &t, std::size_t h,
                      MatchMode mode,
                      const LabelSimilarity &similarity = strict_label_similarity);

struct ScoreReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t predicted = 0;  // |S|, or predicted positives for SLC
  std::size_t gold = 0;       // |T|, or gold positives for SLC
  // Precision or recall above 1: possible when same-label gold (or
  // predicted) fragments overlap each other; credits are not clamped.
  bool exceeds_unit = false;
  // Only for sentence-level scoring.
  std::optional<std::size_t> true_positives;

  struct PerTechnique;
  std::vector<PerTechnique> per_technique;
};

struct ScoreReport::PerTechnique {
  Technique technique;
  ScoreReport report;
};

// Harmonic mean; 0 when either input is 0.
double harmonic_mean(double precision, double recall);

// Precision and recall over many documents: credits are summed within each
// document (fragments of different documents never match) and divided by
// the corpus-level |S| and |T|. Both are 0 when their denominator is 0.
double precision(const Annotations &predicted, const Annotations &gold,
                 MatchMode mode,
                 const LabelSimilarity &similarity = strict_label_similarity);
double recall(const Annotations &predicted, const Annotations &gold,
              MatchMode mode,
              const LabelSimilarity &similarity = strict_label_similarity);

// Single-document conveniences. Throws fgprop::Error when the doc_ids
// differ (fragments of different documents are never paired).
double precision(const AnnotationSet &predicted, const AnnotationSet &gold,
                 MatchMode mode);
double recall(const AnnotationSet &predicted, const AnnotationSet &gold,
              MatchMode mode);

struct ScoreOptions {
  MatchMode mode = MatchMode::kFullTask;
  bool per_technique = false;
  LabelSimilarity similarity = strict_label_similarity;
};

// Precision, recall and F1. With per_technique, both sets are restricted to
// one technique at a time and rescored (every technique present in either
// set gets an entry).
ScoreReport score(const Annotations &predicted, const Annotations &gold,
                  const ScoreOptions &options = {});

ScoreReport f1(const AnnotationSet &predicted, const AnnotationSet &gold,
               MatchMode mode);

// Binary metrics with propaganda as the positive class. Throws
// fgprop::Error when the sequences differ in length.
ScoreReport slc_metrics(std::span<const bool> predicted,
                        std::span<const bool> gold);
ScoreReport slc_metrics(const std::vector<bool> &predicted,
                        const std::vector<bool> &gold);

// "P 12.34 R 56.78 F1 20.27": percentages with two decimals.
std::string format_prf(const ScoreReport &report);

nlohmann::json to_json(const ScoreReport &report);

}  // namespace fgprop

#endif  // FGPROP_METRIC_H_
