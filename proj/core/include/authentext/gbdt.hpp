#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "authentext/corpus.hpp"
#include "authentext/sparse.hpp"

namespace authentext {

enum class TreeGrowth {
  leaf_wise,  // repeatedly split the leaf with the best gain (LightGBM style)
  symmetric,  // one (column, threshold) per depth level (oblivious trees)
};

std::string_view tree_growth_name(TreeGrowth growth) noexcept;
TreeGrowth tree_growth_from_name(std::string_view name);

struct GbdtConfig {
  TreeGrowth variant = TreeGrowth::leaf_wise;
  std::size_t n_trees = 200;
  double learning_rate = 0.1;
  std::size_t max_leaves = 31;  // leaf_wise
  std::size_t depth = 6;        // symmetric
  std::size_t n_bins = 255;
  std::size_t min_data_in_leaf = 20;
  double lambda_l2 = 1.0;

  friend bool operator==(const GbdtConfig&, const GbdtConfig&) = default;
};

/// Error(config) naming the first invalid field.
void validate(const GbdtConfig& config);

struct TreeNode {
  std::int32_t left = -1;  // -1 marks a leaf
  std::int32_t right = -1;
  Column feature = 0;
  std::uint32_t bin = 0;
  double threshold = 0.0;  // x <= threshold goes left
  double value = 0.0;      // leaf output (already scaled by the learning rate)

  bool is_leaf() const noexcept { return left < 0; }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(SparseRow row) const noexcept;
  std::size_t leaf_count() const noexcept;
  std::size_t depth() const noexcept;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct GbdtModel {
  GbdtConfig config;
  double base_score = 0.0;  // log-odds of the training positive rate
  std::size_t n_features = 0;
  std::vector<DecisionTree> trees;

  double raw_score(SparseRow row) const noexcept;

  friend bool operator==(const GbdtModel&, const GbdtModel&) = default;
};

/// Value-ordered bins of one feature column. The zero bin holds exact zeros
/// (implicit sparse entries) and sits at index 0 unless the column has
/// negative values, which take the bins before it.
struct FeatureBins {
  std::vector<double> upper;  // inclusive upper bound of each bin, ascending
  std::uint32_t zero_bin = 0;

  std::size_t size() const noexcept { return upper.size(); }
  std::uint32_t bin_of(double value) const noexcept;

  friend bool operator==(const FeatureBins&, const FeatureBins&) = default;
};

/// Quantile bins over the nonzero training values of a column: every distinct
/// value gets its own bin when they fit in n_bins - 1, else equal-frequency bins.
FeatureBins make_bins(std::span<const double> nonzero_values, std::size_t n_bins);

/// make_bins for every column of X.
std::vector<FeatureBins> make_bins(const SparseMatrix& X, std::size_t n_bins);

struct BinStats {
  double grad = 0.0;
  double hess = 0.0;
  std::size_t count = 0;
};

/// Per-bin gradient/hessian sums of one dense column slice.
std::vector<BinStats> build_histogram(const FeatureBins& bins, std::span<const double> column_values,
                                      std::span<const double> gradients,
                                      std::span<const double> hessians);

/// 1/2 [G_L^2/(H_L+l) + G_R^2/(H_R+l) - (G_L+G_R)^2/(H_L+H_R+l)].
double split_gain(double g_left, double h_left, double g_right, double h_right,
                  double lambda_l2) noexcept;

/// Ordering used for every gain comparison: `candidate` wins only when it
/// exceeds `incumbent` by more than a 1e-10 relative margin, so near-equal
/// gains fall back to the scan order (lowest column, then lowest bin).
bool gain_improves(double candidate, double incumbent) noexcept;

/// Smallest gain accepted as an improvement over not splitting.
double minimum_split_gain(double parent_score) noexcept;

struct SplitCandidate {
  Column column = 0;
  std::uint32_t bin = 0;
  double threshold = 0.0;
  double gain = 0.0;

  friend bool operator==(const SplitCandidate&, const SplitCandidate&) = default;
};

/// Best split over per-column histograms (all built from the same sample
/// set), respecting min_data_in_leaf on both sides; nullopt when no split has
/// positive gain.
std::optional<SplitCandidate> find_best_split(std::span<const std::vector<BinStats>> histograms,
                                              std::span<const FeatureBins> bins, double lambda_l2,
                                              std::size_t min_data_in_leaf);

/// Logistic-loss boosting with L2 leaf regularization; leaf value is
/// -G/(H + lambda) * learning_rate. Error(training) on single-class data.
GbdtModel train_gbdt(const SparseMatrix& X, std::span<const Label> y, const GbdtConfig& config);

std::vector<double> gbdt_predict_proba(const GbdtModel& model, const SparseMatrix& X);

}  // namespace authentext
