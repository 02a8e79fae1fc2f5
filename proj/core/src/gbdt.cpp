#include "authentext/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "authentext/error.hpp"
#include "numeric.hpp"

namespace authentext {

std::string_view tree_growth_name(TreeGrowth growth) noexcept {
  return growth == TreeGrowth::leaf_wise ? "leaf_wise" : "symmetric";
}

TreeGrowth tree_growth_from_name(std::string_view name) {
  if (name == "leaf_wise") return TreeGrowth::leaf_wise;
  if (name == "symmetric") return TreeGrowth::symmetric;
  throw Error(ErrorCode::config, "gbdt.variant must be leaf_wise or symmetric, got '" +
                                     std::string(name) + "'");
}

void validate(const GbdtConfig& c) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::config, "key 'gbdt." + what); };
  if (!(c.learning_rate >= 0.0) || !std::isfinite(c.learning_rate)) fail("learning_rate' must be >= 0");
  if (!(c.lambda_l2 >= 0.0) || !std::isfinite(c.lambda_l2)) fail("lambda_l2' must be >= 0");
  if (c.n_bins < 2 || c.n_bins > 65536) fail("n_bins' must lie in [2, 65536]");
  if (c.min_data_in_leaf < 1) fail("min_data_in_leaf' must be >= 1");
  if (c.variant == TreeGrowth::leaf_wise && c.max_leaves < 2) fail("max_leaves' must be >= 2");
  if (c.variant == TreeGrowth::symmetric && (c.depth < 1 || c.depth > 20)) {
    fail("depth' must lie in [1, 20]");
  }
}

double DecisionTree::predict(SparseRow row) const noexcept {
  std::size_t k = 0;
  while (!nodes[k].is_leaf()) {
    const TreeNode& n = nodes[k];
    k = static_cast<std::size_t>(row.at(n.feature) <= n.threshold ? n.left : n.right);
  }
  return nodes[k].value;
}

std::size_t DecisionTree::leaf_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t DecisionTree::depth() const noexcept {
  if (nodes.empty()) return 0;
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    deepest = std::max(deepest, d[k]);
    if (!nodes[k].is_leaf()) {
      d[static_cast<std::size_t>(nodes[k].left)] = d[k] + 1;
      d[static_cast<std::size_t>(nodes[k].right)] = d[k] + 1;
    }
  }
  return deepest;
}

double GbdtModel::raw_score(SparseRow row) const noexcept {
  double s = base_score;
  for (const auto& t : trees) s += t.predict(row);
  return s;
}

std::uint32_t FeatureBins::bin_of(double value) const noexcept {
  auto it = std::lower_bound(upper.begin(), upper.end(), value);
  if (it == upper.end()) return static_cast<std::uint32_t>(upper.size() - 1);
  return static_cast<std::uint32_t>(it - upper.begin());
}

namespace {

// Upper bounds for one sign of a column; `sorted` is ascending and non-empty.
std::vector<double> side_uppers(const std::vector<double>& sorted, std::size_t budget) {
  std::vector<double> distinct;
  for (double v : sorted) {
    if (distinct.empty() || v != distinct.back()) distinct.push_back(v);
  }
  if (distinct.size() <= budget) return distinct;
  std::vector<double> uppers;
  const std::size_t m = sorted.size();
  for (std::size_t q = 1; q <= budget; ++q) {
    const std::size_t idx = (q * m + budget - 1) / budget - 1;
    const double v = sorted[idx];
    if (uppers.empty() || v > uppers.back()) uppers.push_back(v);
  }
  return uppers;
}

std::size_t distinct_count(const std::vector<double>& sorted) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i == 0 || sorted[i] != sorted[i - 1]) ++d;
  }
  return d;
}

}  // namespace

FeatureBins make_bins(std::span<const double> nonzero_values, std::size_t n_bins) {
  if (n_bins < 2) throw Error(ErrorCode::config, "gbdt.n_bins must be >= 2");
  std::vector<double> neg, pos;
  for (double v : nonzero_values) {
    if (v < 0.0) {
      neg.push_back(v);
    } else if (v > 0.0) {
      pos.push_back(v);
    }
  }
  std::sort(neg.begin(), neg.end());
  std::sort(pos.begin(), pos.end());

  const std::size_t budget = n_bins - 1;
  const std::size_t dn = distinct_count(neg), dp = distinct_count(pos);
  std::size_t bn = dn, bp = dp;
  if (dn + dp > budget) {
    if (dn == 0) {
      bp = budget;
    } else if (dp == 0) {
      bn = budget;
    } else {
      const double share = static_cast<double>(neg.size()) / static_cast<double>(neg.size() + pos.size());
      bn = static_cast<std::size_t>(std::llround(share * static_cast<double>(budget)));
      bn = std::clamp<std::size_t>(bn, 1, std::max<std::size_t>(1, budget - 1));
      bn = std::min(bn, dn);
      bp = std::min(dp, std::max<std::size_t>(1, budget - bn));
      bn = std::min(dn, std::max<std::size_t>(1, budget - bp));
    }
  }

  FeatureBins bins;
  if (!neg.empty()) bins.upper = side_uppers(neg, bn);
  bins.zero_bin = static_cast<std::uint32_t>(bins.upper.size());
  bins.upper.push_back(0.0);
  if (!pos.empty()) {
    auto p = side_uppers(pos, bp);
    bins.upper.insert(bins.upper.end(), p.begin(), p.end());
  }
  return bins;
}

std::vector<FeatureBins> make_bins(const SparseMatrix& X, std::size_t n_bins) {
  std::vector<std::vector<double>> columns(X.n_cols());
  for (std::size_t i = 0; i < X.n_rows(); ++i) {
    const auto row = X.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) columns[row.indices[k]].push_back(row.values[k]);
  }
  std::vector<FeatureBins> out;
  out.reserve(X.n_cols());
  for (const auto& col : columns) out.push_back(make_bins(col, n_bins));
  return out;
}

std::vector<BinStats> build_histogram(const FeatureBins& bins, std::span<const double> column_values,
                                      std::span<const double> gradients,
                                      std::span<const double> hessians) {
  if (column_values.size() != gradients.size() || gradients.size() != hessians.size()) {
    throw Error(ErrorCode::mismatch, "histogram inputs differ in length");
  }
  std::vector<BinStats> hist(bins.size());
  for (std::size_t i = 0; i < column_values.size(); ++i) {
    const double v = column_values[i];
    auto& s = hist[v == 0.0 ? bins.zero_bin : bins.bin_of(v)];
    s.grad += gradients[i];
    s.hess += hessians[i];
    ++s.count;
  }
  return hist;
}

double split_gain(double g_left, double h_left, double g_right, double h_right,
                  double lambda_l2) noexcept {
  const double g = g_left + g_right;
  const double h = h_left + h_right;
  return 0.5 * (g_left * g_left / (h_left + lambda_l2) + g_right * g_right / (h_right + lambda_l2) -
                g * g / (h + lambda_l2));
}

bool gain_improves(double candidate, double incumbent) noexcept {
  return candidate > incumbent + 1e-10 * std::max(1.0, std::abs(incumbent));
}

double minimum_split_gain(double parent_score) noexcept {
  return 1e-12 * std::max(1.0, std::abs(parent_score));
}

namespace {

struct Totals {
  double grad = 0.0;
  double hess = 0.0;
  std::size_t count = 0;
};

// Scans the thresholds of one column histogram (zero bin filled in) and
// updates `best` under the scan-order tie rule.
void scan_column(std::span<const BinStats> hist, const FeatureBins& bins, Column column,
                 const Totals& totals, double lambda, std::size_t min_data,
                 std::optional<SplitCandidate>& best) {
  const double parent = totals.grad * totals.grad / (totals.hess + lambda);
  const double floor = minimum_split_gain(parent);
  double gl = 0.0, hl = 0.0;
  std::size_t nl = 0;
  for (std::size_t b = 0; b + 1 < hist.size(); ++b) {
    gl += hist[b].grad;
    hl += hist[b].hess;
    nl += hist[b].count;
    if (nl < min_data) continue;
    if (totals.count - nl < min_data) break;
    const double gain = split_gain(gl, hl, totals.grad - gl, totals.hess - hl, lambda);
    if (gain > floor && (!best || gain_improves(gain, best->gain))) {
      best = SplitCandidate{column, static_cast<std::uint32_t>(b), bins.upper[b], gain};
    }
  }
}

}  // namespace

std::optional<SplitCandidate> find_best_split(std::span<const std::vector<BinStats>> histograms,
                                              std::span<const FeatureBins> bins, double lambda_l2,
                                              std::size_t min_data_in_leaf) {
  if (histograms.size() != bins.size()) {
    throw Error(ErrorCode::mismatch, "one histogram per feature column is required");
  }
  std::optional<SplitCandidate> best;
  for (std::size_t c = 0; c < histograms.size(); ++c) {
    Totals t;
    for (const auto& s : histograms[c]) {
      t.grad += s.grad;
      t.hess += s.hess;
      t.count += s.count;
    }
    scan_column(histograms[c], bins[c], static_cast<Column>(c), t, lambda_l2,
                std::max<std::size_t>(1, min_data_in_leaf), best);
  }
  return best;
}

namespace {

using Rows = std::vector<std::uint32_t>;

// Binned training data plus the scratch histogram shared by all nodes.
class Booster {
 public:
  Booster(const SparseMatrix& X, std::span<const Label> y, const GbdtConfig& config)
      : X_(X), y_(y), config_(config), bins_(make_bins(X, config.n_bins)),
        min_data_(std::max<std::size_t>(1, config.min_data_in_leaf)) {
    offsets_.resize(X.n_cols() + 1, 0);
    for (std::size_t c = 0; c < X.n_cols(); ++c) offsets_[c + 1] = offsets_[c] + bins_[c].size();
    hist_.resize(offsets_.back());
    touched_.assign(X.n_cols(), 0);
    row_bins_.resize(X.nnz());
    for (std::size_t i = 0; i < X.n_rows(); ++i) {
      const auto row = X.row(i);
      const std::size_t base = X.offsets()[i];
      for (std::size_t k = 0; k < row.size(); ++k) {
        row_bins_[base + k] = bins_[row.indices[k]].bin_of(row.values[k]);
      }
    }
    grad_.resize(X.n_rows());
    hess_.resize(X.n_rows());
  }

  GbdtModel run() {
    GbdtModel model;
    model.config = config_;
    model.n_features = X_.n_cols();
    const double positives = static_cast<double>(std::accumulate(y_.begin(), y_.end(), std::size_t{0}));
    const double mean = positives / static_cast<double>(y_.size());
    model.base_score = std::log(mean / (1.0 - mean));

    std::vector<double> score(X_.n_rows(), model.base_score);
    Rows all(X_.n_rows());
    std::iota(all.begin(), all.end(), std::uint32_t{0});
    for (std::size_t t = 0; t < config_.n_trees; ++t) {
      for (std::size_t i = 0; i < X_.n_rows(); ++i) {
        const double p = detail::sigmoid(score[i]);
        grad_[i] = p - static_cast<double>(y_[i]);
        hess_[i] = p * (1.0 - p);
      }
      model.trees.push_back(config_.variant == TreeGrowth::leaf_wise ? grow_leaf_wise(all, score)
                                                                     : grow_symmetric(all, score));
    }
    return model;
  }

 private:
  struct Leaf {
    std::int32_t node;
    Rows rows;
    Totals totals;
    std::optional<SplitCandidate> best;
  };

  Totals totals_of(const Rows& rows) const {
    Totals t;
    for (std::uint32_t r : rows) {
      t.grad += grad_[r];
      t.hess += hess_[r];
    }
    t.count = rows.size();
    return t;
  }

  // Fills hist_ for `rows` (zero bins included) and records touched columns
  // in ascending order. Untouched columns hold every row in the zero bin and
  // cannot split.
  void accumulate(const Rows& rows, const Totals& totals) {
    touched_cols_.clear();
    for (std::uint32_t r : rows) {
      const auto row = X_.row(r);
      const std::size_t base = X_.offsets()[r];
      for (std::size_t k = 0; k < row.size(); ++k) {
        const Column c = row.indices[k];
        BinStats& s = hist_[offsets_[c] + row_bins_[base + k]];
        s.grad += grad_[r];
        s.hess += hess_[r];
        ++s.count;
        if (!touched_[c]) {
          touched_[c] = 1;
          touched_cols_.push_back(c);
        }
      }
    }
    std::sort(touched_cols_.begin(), touched_cols_.end());
    for (Column c : touched_cols_) {
      auto h = column_hist(c);
      Totals nonzero;
      for (std::size_t b = 0; b < h.size(); ++b) {
        if (b == bins_[c].zero_bin) continue;
        nonzero.grad += h[b].grad;
        nonzero.hess += h[b].hess;
        nonzero.count += h[b].count;
      }
      BinStats& z = h[bins_[c].zero_bin];
      z.grad = totals.grad - nonzero.grad;
      z.hess = totals.hess - nonzero.hess;
      z.count = totals.count - nonzero.count;
    }
  }

  void clear_hist() {
    for (Column c : touched_cols_) {
      touched_[c] = 0;
      auto h = column_hist(c);
      std::fill(h.begin(), h.end(), BinStats{});
    }
    touched_cols_.clear();
  }

  std::span<BinStats> column_hist(Column c) {
    return std::span(hist_).subspan(offsets_[c], offsets_[c + 1] - offsets_[c]);
  }

  std::uint32_t row_bin(std::uint32_t r, Column c) const {
    const auto row = X_.row(r);
    auto it = std::lower_bound(row.indices.begin(), row.indices.end(), c);
    if (it == row.indices.end() || *it != c) return bins_[c].zero_bin;
    return row_bins_[X_.offsets()[r] + static_cast<std::size_t>(it - row.indices.begin())];
  }

  std::pair<Rows, Rows> partition(const Rows& rows, Column c, std::uint32_t bin) const {
    Rows left, right;
    for (std::uint32_t r : rows) (row_bin(r, c) <= bin ? left : right).push_back(r);
    return {std::move(left), std::move(right)};
  }

  double leaf_value(const Totals& t) const {
    return -t.grad / (t.hess + config_.lambda_l2) * config_.learning_rate;
  }

  void evaluate(Leaf& leaf) {
    leaf.best.reset();
    if (leaf.totals.count < 2 * min_data_) return;
    accumulate(leaf.rows, leaf.totals);
    for (Column c : touched_cols_) {
      scan_column(column_hist(c), bins_[c], c, leaf.totals, config_.lambda_l2, min_data_, leaf.best);
    }
    clear_hist();
  }

  DecisionTree grow_leaf_wise(const Rows& all, std::vector<double>& score) {
    DecisionTree tree;
    tree.nodes.emplace_back();
    std::vector<Leaf> leaves;
    leaves.push_back(Leaf{0, all, totals_of(all), std::nullopt});
    evaluate(leaves.back());

    while (leaves.size() < config_.max_leaves) {
      std::sort(leaves.begin(), leaves.end(),
                [](const Leaf& a, const Leaf& b) { return a.node < b.node; });
      Leaf* pick = nullptr;
      for (auto& leaf : leaves) {
        if (leaf.best && (!pick || gain_improves(leaf.best->gain, pick->best->gain))) pick = &leaf;
      }
      if (!pick) break;

      const SplitCandidate split = *pick->best;
      const auto left_id = static_cast<std::int32_t>(tree.nodes.size());
      TreeNode& parent = tree.nodes[static_cast<std::size_t>(pick->node)];
      parent.feature = split.column;
      parent.bin = split.bin;
      parent.threshold = split.threshold;
      parent.left = left_id;
      parent.right = left_id + 1;
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();

      auto [lrows, rrows] = partition(pick->rows, split.column, split.bin);
      Leaf left{left_id, std::move(lrows), {}, std::nullopt};
      Leaf right{left_id + 1, std::move(rrows), {}, std::nullopt};
      left.totals = totals_of(left.rows);
      right.totals = totals_of(right.rows);
      evaluate(left);
      evaluate(right);
      *pick = std::move(left);
      leaves.push_back(std::move(right));
    }

    for (const auto& leaf : leaves) {
      const double v = leaf_value(leaf.totals);
      tree.nodes[static_cast<std::size_t>(leaf.node)].value = v;
      for (std::uint32_t r : leaf.rows) score[r] += v;
    }
    return tree;
  }

  struct LevelNode {
    Rows rows;
    Totals totals;
    Totals source;  // statistics the leaf value is taken from
    bool frozen = false;
  };

  DecisionTree grow_symmetric(const Rows& all, std::vector<double>& score) {
    DecisionTree tree;
    tree.nodes.emplace_back();
    std::vector<LevelNode> level(1);
    level[0].rows = all;
    level[0].totals = level[0].source = totals_of(all);
    std::vector<std::size_t> level_ids{0};

    std::vector<double> gain_total(hist_.size());
    std::vector<std::uint8_t> valid(hist_.size());

    for (std::size_t d = 0; d < config_.depth; ++d) {
      std::fill(gain_total.begin(), gain_total.end(), 0.0);
      std::fill(valid.begin(), valid.end(), 0);
      double parent_scores = 0.0;
      for (const auto& node : level) {
        if (node.frozen || node.totals.count < 2 * min_data_) continue;
        parent_scores +=
            node.totals.grad * node.totals.grad / (node.totals.hess + config_.lambda_l2);
        accumulate(node.rows, node.totals);
        for (Column c : touched_cols_) {
          auto h = column_hist(c);
          double gl = 0.0, hl = 0.0;
          std::size_t nl = 0;
          for (std::size_t b = 0; b + 1 < h.size(); ++b) {
            gl += h[b].grad;
            hl += h[b].hess;
            nl += h[b].count;
            if (nl < min_data_) continue;
            if (node.totals.count - nl < min_data_) break;
            gain_total[offsets_[c] + b] += split_gain(gl, hl, node.totals.grad - gl,
                                                      node.totals.hess - hl, config_.lambda_l2);
            valid[offsets_[c] + b] = 1;
          }
        }
        clear_hist();
      }

      std::optional<SplitCandidate> best;
      const double floor = minimum_split_gain(parent_scores);
      for (Column c = 0; c < X_.n_cols(); ++c) {
        for (std::size_t b = 0; b + 1 < bins_[c].size(); ++b) {
          const std::size_t k = offsets_[c] + b;
          if (!valid[k] || !(gain_total[k] > floor)) continue;
          if (!best || gain_improves(gain_total[k], best->gain)) {
            best = SplitCandidate{c, static_cast<std::uint32_t>(b), bins_[c].upper[b], gain_total[k]};
          }
        }
      }
      // No usable split: pad with a test every row passes.
      const SplitCandidate split =
          best ? *best
               : SplitCandidate{0, static_cast<std::uint32_t>(bins_[0].size() - 1),
                                std::numeric_limits<double>::max(), 0.0};

      std::vector<LevelNode> next;
      std::vector<std::size_t> next_ids;
      next.reserve(2 * level.size());
      for (std::size_t i = 0; i < level.size(); ++i) {
        LevelNode& node = level[i];
        TreeNode& tn = tree.nodes[level_ids[i]];
        tn.feature = split.column;
        tn.bin = split.bin;
        tn.threshold = split.threshold;
        tn.left = static_cast<std::int32_t>(tree.nodes.size());
        tn.right = tn.left + 1;
        next_ids.push_back(tree.nodes.size());
        next_ids.push_back(tree.nodes.size() + 1);
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();

        auto [lrows, rrows] = partition(node.rows, split.column, split.bin);
        const bool splits = best && !node.frozen && lrows.size() >= min_data_ &&
                            rrows.size() >= min_data_;
        LevelNode left, right;
        left.rows = std::move(lrows);
        right.rows = std::move(rrows);
        if (splits) {
          left.totals = left.source = totals_of(left.rows);
          right.totals = right.source = totals_of(right.rows);
        } else {
          // Blocked: both children repeat this node's value.
          left.frozen = right.frozen = true;
          left.source = right.source = node.source;
          left.totals = totals_of(left.rows);
          right.totals = totals_of(right.rows);
        }
        next.push_back(std::move(left));
        next.push_back(std::move(right));
      }
      level = std::move(next);
      level_ids = std::move(next_ids);
    }

    for (std::size_t i = 0; i < level.size(); ++i) {
      const double v = leaf_value(level[i].source);
      tree.nodes[level_ids[i]].value = v;
      for (std::uint32_t r : level[i].rows) score[r] += v;
    }
    return tree;
  }

  const SparseMatrix& X_;
  std::span<const Label> y_;
  GbdtConfig config_;
  std::vector<FeatureBins> bins_;
  std::size_t min_data_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> row_bins_;
  std::vector<BinStats> hist_;
  std::vector<std::uint8_t> touched_;
  std::vector<Column> touched_cols_;
  std::vector<double> grad_;
  std::vector<double> hess_;
};

}  // namespace

GbdtModel train_gbdt(const SparseMatrix& X, std::span<const Label> y, const GbdtConfig& config) {
  validate(config);
  if (X.n_rows() != y.size()) throw Error(ErrorCode::mismatch, "feature rows and labels differ in length");
  const std::size_t positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), Label{1}));
  if (positives == 0 || positives == y.size()) {
    throw Error(ErrorCode::training, "GBDT training needs both classes present");
  }
  if (X.n_cols() == 0) throw Error(ErrorCode::training, "GBDT training needs at least one feature");
  return Booster(X, y, config).run();
}

std::vector<double> gbdt_predict_proba(const GbdtModel& model, const SparseMatrix& X) {
  if (X.n_cols() != model.n_features) {
    throw Error(ErrorCode::mismatch, "GBDT model expects " + std::to_string(model.n_features) +
                                         " features, matrix has " + std::to_string(X.n_cols()));
  }
  std::vector<double> out(X.n_rows());
  for (std::size_t i = 0; i < X.n_rows(); ++i) out[i] = detail::sigmoid(model.raw_score(X.row(i)));
  return out;
}

}  // namespace authentext
