#include "authentext/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "authentext/error.hpp"

namespace authentext {

namespace {

void check_inputs(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::mismatch, "scores and labels differ in length (" +
                                         std::to_string(scores.size()) + " vs " +
                                         std::to_string(labels.size()) + ")");
  }
  for (double s : scores) {
    if (std::isnan(s)) throw Error(ErrorCode::input, "score is NaN");
  }
}

struct ClassCounts {
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

ClassCounts count_classes(std::span<const Label> labels) {
  ClassCounts c;
  for (Label y : labels) (y ? c.positives : c.negatives)++;
  if (c.positives == 0 || c.negatives == 0) {
    throw Error(ErrorCode::input, "ROC analysis needs both positive and negative labels");
  }
  return c;
}

// Indices sorted by descending score; ties keep input order.
std::vector<std::size_t> descending_order(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

double ratio(std::size_t a, std::size_t b) {
  return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
}

}  // namespace

double ConfusionCounts::tpr() const noexcept { return ratio(tp, tp + fn); }
double ConfusionCounts::fpr() const noexcept { return ratio(fp, fp + tn); }

ConfusionCounts confusion_at(std::span<const double> scores, std::span<const Label> labels,
                             double threshold) {
  check_inputs(scores, labels);
  ConfusionCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i]) {
      (predicted ? c.tp : c.fn)++;
    } else {
      (predicted ? c.fp : c.tn)++;
    }
  }
  return c;
}

RocCurve roc_curve(std::span<const double> scores, std::span<const Label> labels) {
  check_inputs(scores, labels);
  const ClassCounts cc = count_classes(labels);
  const auto order = descending_order(scores);
  RocCurve curve;
  curve.fpr.push_back(0.0);
  curve.tpr.push_back(0.0);
  curve.thresholds.push_back(std::numeric_limits<double>::infinity());
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) (labels[order[i]] ? tp : fp)++;
    curve.fpr.push_back(ratio(fp, cc.negatives));
    curve.tpr.push_back(ratio(tp, cc.positives));
    curve.thresholds.push_back(s);
  }
  return curve;
}

double AucFraction::value() const noexcept {
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

AucFraction roc_auc_fraction(std::span<const double> scores, std::span<const Label> labels) {
  check_inputs(scores, labels);
  const ClassCounts cc = count_classes(labels);
  const auto order = descending_order(scores);
  // Each negative earns 2 per positive ranked above it and 1 per tied positive.
  std::uint64_t twice_u = 0;
  std::uint64_t tp_before = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    std::uint64_t tp_block = 0, fp_block = 0;
    for (; i < order.size() && scores[order[i]] == s; ++i) (labels[order[i]] ? tp_block : fp_block)++;
    twice_u += fp_block * (2 * tp_before + tp_block);
    tp_before += tp_block;
  }
  return {twice_u, 2 * static_cast<std::uint64_t>(cc.positives) * cc.negatives};
}

double roc_auc(std::span<const double> scores, std::span<const Label> labels) {
  return roc_auc_fraction(scores, labels).value();
}

double area_under(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t k = 1; k < curve.size(); ++k) {
    area += (curve.fpr[k] - curve.fpr[k - 1]) * (curve.tpr[k] + curve.tpr[k - 1]) * 0.5;
  }
  return area;
}

EvaluationReport evaluate_scores(std::span<const double> scores, std::span<const Label> labels) {
  EvaluationReport r;
  r.auc = roc_auc_fraction(scores, labels);
  r.curve = roc_curve(scores, labels);
  r.documents = scores.size();
  for (Label y : labels) (y ? r.positives : r.negatives)++;
  for (int k = 1; k <= 9; ++k) {
    const double t = k / 10.0;
    r.table.push_back({t, confusion_at(scores, labels, t)});
  }
  return r;
}

std::string report_text(const EvaluationReport& r) {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed;
  out << "documents  " << r.documents << " (" << r.positives << " positive, " << r.negatives
      << " negative)\n";
  out << "roc_auc    " << r.auc.value() << "\n";
  out << "roc_points " << r.curve.size() << "\n\n";
  out << "threshold      tp      fp      tn      fn       tpr       fpr\n";
  for (const auto& row : r.table) {
    const auto& c = row.counts;
    char line[128];
    std::snprintf(line, sizeof line, "%9.1f %7zu %7zu %7zu %7zu %9.6f %9.6f\n", row.threshold, c.tp,
                  c.fp, c.tn, c.fn, c.tpr(), c.fpr());
    out << line;
  }
  return out.str();
}

std::string report_json(const EvaluationReport& r) {
  using nlohmann::json;
  json roc = json::array();
  for (std::size_t k = 0; k < r.curve.size(); ++k) {
    json threshold = std::isinf(r.curve.thresholds[k]) ? json(nullptr) : json(r.curve.thresholds[k]);
    roc.push_back({{"fpr", r.curve.fpr[k]}, {"tpr", r.curve.tpr[k]}, {"threshold", threshold}});
  }
  json confusion = json::array();
  for (const auto& row : r.table) {
    const auto& c = row.counts;
    confusion.push_back({{"threshold", row.threshold},
                         {"tp", c.tp},
                         {"fp", c.fp},
                         {"tn", c.tn},
                         {"fn", c.fn},
                         {"tpr", c.tpr()},
                         {"fpr", c.fpr()}});
  }
  const json doc = {{"documents", r.documents},
                    {"positives", r.positives},
                    {"negatives", r.negatives},
                    {"auc", r.auc.value()},
                    {"auc_pairs", {{"numerator", r.auc.numerator}, {"denominator", r.auc.denominator}}},
                    {"roc", std::move(roc)},
                    {"confusion", std::move(confusion)}};
  return doc.dump(1) + "\n";
}

}  // namespace authentext
