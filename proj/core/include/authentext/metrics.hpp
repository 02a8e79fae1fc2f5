#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "authentext/corpus.hpp"

namespace authentext {

/// Counts at one threshold; a score is predicted positive iff score >= threshold.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  double tpr() const noexcept;  // tp / (tp + fn)
  double fpr() const noexcept;  // fp / (fp + tn)

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion_at(std::span<const double> scores, std::span<const Label> labels,
                             double threshold);

/// Points ordered by descending threshold. Point 0 is (0, 0) with threshold
/// +infinity; point k > 0 counts every score >= thresholds[k], so a block of
/// tied scores enters as one diagonal segment. The last point is (1, 1).
struct RocCurve {
  std::vector<double> fpr;
  std::vector<double> tpr;
  std::vector<double> thresholds;

  std::size_t size() const noexcept { return fpr.size(); }
};

/// Error(input) unless both classes are present.
RocCurve roc_curve(std::span<const double> scores, std::span<const Label> labels);

/// AUC as the exact ratio 2U / (2PN), where U is the Mann-Whitney statistic
/// with half credit per tied pair.
struct AucFraction {
  std::uint64_t numerator = 0;    // 2U
  std::uint64_t denominator = 0;  // 2PN

  double value() const noexcept;

  friend bool operator==(const AucFraction&, const AucFraction&) = default;
};

AucFraction roc_auc_fraction(std::span<const double> scores, std::span<const Label> labels);
double roc_auc(std::span<const double> scores, std::span<const Label> labels);

/// Trapezoidal area under a curve in floating point.
double area_under(const RocCurve& curve);

struct ThresholdRow {
  double threshold = 0.0;
  ConfusionCounts counts;
};

struct EvaluationReport {
  std::size_t documents = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  AucFraction auc;
  RocCurve curve;
  std::vector<ThresholdRow> table;  // thresholds 0.1, 0.2, ..., 0.9
};

EvaluationReport evaluate_scores(std::span<const double> scores, std::span<const Label> labels);

/// Human-readable summary.
std::string report_text(const EvaluationReport& report);

/// {"documents", "positives", "negatives", "auc", "auc_pairs": {numerator,
/// denominator}, "roc": [{"fpr", "tpr", "threshold"}], "confusion":
/// [{"threshold", "tp", "fp", "tn", "fn", "tpr", "fpr"}]}. The first ROC point
/// has a null threshold.
std::string report_json(const EvaluationReport& report);

}  // namespace authentext
