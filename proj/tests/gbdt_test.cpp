#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "authentext/error.hpp"
#include "authentext/gbdt.hpp"
#include "authentext/metrics.hpp"
#include "oracles/gbdt_oracle.hpp"

using namespace authentext;

namespace {

struct DenseCase {
  std::vector<std::vector<double>> rows;
  std::vector<Label> y;
  SparseMatrix X;
};

DenseCase random_case(std::mt19937_64& rng, std::size_t n, std::size_t cols) {
  static const double pool[] = {-2.0, -1.0, -0.5, 0.0, 0.0, 0.0, 0.25, 0.5, 1.0, 3.0};
  std::normal_distribution<double> noise(0.0, 1.0);
  DenseCase c;
  std::vector<double> flat;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(cols);
    for (auto& v : row) {
      v = (rng() % 4 == 0) ? noise(rng) : pool[rng() % std::size(pool)];
    }
    const double signal = row[0] - 0.5 * row[cols > 1 ? 1 : 0] + 0.7 * noise(rng);
    c.y.push_back(static_cast<Label>(signal > 0));
    flat.insert(flat.end(), row.begin(), row.end());
    c.rows.push_back(std::move(row));
  }
  c.y[0] = 0;
  c.y[1] = 1;
  c.X = SparseMatrix::from_dense(flat, n, cols);
  return c;
}

void expect_same_trees(const GbdtModel& got, const oracle::GbdtResult& want, const std::string& what) {
  ASSERT_NEAR(got.base_score, want.base_score, 1e-15) << what;
  ASSERT_EQ(got.trees.size(), want.trees.size()) << what;
  for (std::size_t t = 0; t < want.trees.size(); ++t) {
    const auto& g = got.trees[t].nodes;
    const auto& w = want.trees[t];
    ASSERT_EQ(g.size(), w.size()) << what << " tree " << t;
    for (std::size_t k = 0; k < w.size(); ++k) {
      const std::string where = what + " tree " + std::to_string(t) + " node " + std::to_string(k);
      ASSERT_EQ(g[k].left, w[k].left) << where;
      ASSERT_EQ(g[k].right, w[k].right) << where;
      if (w[k].left < 0) {
        ASSERT_NEAR(g[k].value, w[k].value, 1e-10 * std::max(1.0, std::abs(w[k].value))) << where;
      } else {
        ASSERT_EQ(g[k].feature, w[k].feature) << where;
        ASSERT_EQ(g[k].threshold, w[k].threshold) << where;
      }
    }
  }
}

oracle::GbdtParams params_of(const GbdtConfig& c) {
  oracle::GbdtParams p;
  p.symmetric = c.variant == TreeGrowth::symmetric;
  p.n_trees = c.n_trees;
  p.learning_rate = c.learning_rate;
  p.max_leaves = c.max_leaves;
  p.depth = c.depth;
  p.min_data = c.min_data_in_leaf;
  p.lambda = c.lambda_l2;
  return p;
}

GbdtConfig small_config(std::mt19937_64& rng, TreeGrowth variant) {
  GbdtConfig c;
  c.variant = variant;
  c.n_trees = 1 + rng() % 4;
  c.learning_rate = 0.3;
  c.max_leaves = 2 + rng() % 7;
  c.depth = 1 + rng() % 3;
  c.min_data_in_leaf = 1 + rng() % 6;
  c.lambda_l2 = (rng() % 2) ? 1.0 : 0.1;
  return c;
}

}  // namespace

TEST(GbdtOracle, LeafWiseTreesEqualExhaustiveSplitSearch) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 60; ++trial) {
    const auto c = random_case(rng, 10 + rng() % 91, 1 + rng() % 5);
    const auto cfg = small_config(rng, TreeGrowth::leaf_wise);
    expect_same_trees(train_gbdt(c.X, c.y, cfg), oracle::train_gbdt(c.rows, c.y, params_of(cfg)),
                      "trial " + std::to_string(trial));
  }
}

TEST(GbdtOracle, SymmetricTreesEqualExhaustiveSplitSearch) {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 60; ++trial) {
    const auto c = random_case(rng, 10 + rng() % 91, 1 + rng() % 5);
    const auto cfg = small_config(rng, TreeGrowth::symmetric);
    expect_same_trees(train_gbdt(c.X, c.y, cfg), oracle::train_gbdt(c.rows, c.y, params_of(cfg)),
                      "trial " + std::to_string(trial));
  }
}

TEST(GbdtStructure, SymmetricTreesArePerfectAtConfiguredDepth) {
  std::mt19937_64 rng(7);
  const auto c = random_case(rng, 60, 4);
  for (std::size_t depth : {1u, 3u, 5u}) {
    GbdtConfig cfg;
    cfg.variant = TreeGrowth::symmetric;
    cfg.depth = depth;
    cfg.n_trees = 3;
    cfg.min_data_in_leaf = 15;  // blocks most splits below the root
    const auto model = train_gbdt(c.X, c.y, cfg);
    for (const auto& t : model.trees) {
      EXPECT_EQ(t.nodes.size(), (std::size_t{2} << depth) - 1);
      EXPECT_EQ(t.leaf_count(), std::size_t{1} << depth);
      EXPECT_EQ(t.depth(), depth);
      for (std::size_t k = 0; k < t.nodes.size(); ++k) {
        if (t.nodes[k].is_leaf()) continue;
        EXPECT_EQ(t.nodes[k].left, static_cast<std::int32_t>(2 * k + 1));
        EXPECT_LT(t.nodes[k].feature, model.n_features);
      }
    }
  }
}

TEST(GbdtStructure, LeafWiseRespectsMaxLeavesAndMinData) {
  std::mt19937_64 rng(8);
  const auto c = random_case(rng, 100, 5);
  GbdtConfig cfg;
  cfg.max_leaves = 5;
  cfg.min_data_in_leaf = 7;
  cfg.n_trees = 4;
  const auto model = train_gbdt(c.X, c.y, cfg);
  for (const auto& t : model.trees) {
    EXPECT_LE(t.leaf_count(), 5u);
    for (const auto& n : t.nodes) {
      if (!n.is_leaf()) EXPECT_LT(n.feature, 5u);
    }
  }
}

TEST(Gbdt, ThresholdDatasetSeparatedWithinFiveTrees) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> xs;
  std::vector<Label> y;
  for (int i = 0; i < 200; ++i) {
    xs.push_back(u(rng));
    y.push_back(static_cast<Label>(xs.back() > 0.5));
  }
  const auto X = SparseMatrix::from_dense(xs, 200, 1);
  for (auto variant : {TreeGrowth::leaf_wise, TreeGrowth::symmetric}) {
    GbdtConfig cfg;
    cfg.variant = variant;
    cfg.n_trees = 5;
    EXPECT_EQ(roc_auc(gbdt_predict_proba(train_gbdt(X, y, cfg), X), y), 1.0);
  }
}

TEST(Gbdt, ZeroLearningRateGivesTheBaseRate) {
  std::mt19937_64 rng(9);
  const auto c = random_case(rng, 50, 3);
  GbdtConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.n_trees = 7;
  const auto model = train_gbdt(c.X, c.y, cfg);
  double pos = 0.0;
  for (Label v : c.y) pos += v;
  const double mean = pos / 50.0;
  EXPECT_NEAR(model.base_score, std::log(mean / (1 - mean)), 1e-15);
  for (double p : gbdt_predict_proba(model, c.X)) EXPECT_NEAR(p, mean, 1e-12);
}

TEST(Gbdt, NoTreesGivesSigmoidOfBase) {
  GbdtModel m;
  m.base_score = 0.8;
  m.n_features = 2;
  for (double p : gbdt_predict_proba(m, SparseMatrix::from_dense(std::vector<double>{1, 0, 0, 2}, 2, 2))) {
    EXPECT_NEAR(p, 1.0 / (1.0 + std::exp(-0.8)), 1e-15);
  }
}

TEST(Gbdt, ErrorsAndValidation) {
  std::mt19937_64 rng(10);
  const auto c = random_case(rng, 20, 2);
  EXPECT_THROW(train_gbdt(c.X, std::vector<Label>(20, 1), GbdtConfig{}), Error);
  GbdtConfig bad;
  bad.n_bins = 1;
  EXPECT_THROW(train_gbdt(c.X, c.y, bad), Error);
  bad = GbdtConfig{};
  bad.learning_rate = -1;
  EXPECT_THROW(validate(bad), Error);
  EXPECT_THROW(tree_growth_from_name("oblique"), Error);
  const auto model = train_gbdt(c.X, c.y, GbdtConfig{});
  EXPECT_THROW(gbdt_predict_proba(model, SparseMatrix(3)), Error);
}

TEST(Bins, DistinctValuesGetTheirOwnBinsAroundZero) {
  const std::vector<double> v{-1.0, 2.0, 0.5, -1.0, 2.0, -3.0};
  const auto b = make_bins(v, 255);
  EXPECT_EQ(b.upper, (std::vector<double>{-3.0, -1.0, 0.0, 0.5, 2.0}));
  EXPECT_EQ(b.zero_bin, 2u);
  EXPECT_EQ(b.bin_of(-3.0), 0u);
  EXPECT_EQ(b.bin_of(-2.0), 1u);
  EXPECT_EQ(b.bin_of(0.0), 2u);
  EXPECT_EQ(b.bin_of(0.3), 3u);
  EXPECT_EQ(b.bin_of(100.0), 4u);
  const auto pos = make_bins(std::vector<double>{0.1, 0.2}, 255);
  EXPECT_EQ(pos.zero_bin, 0u);
}

TEST(Bins, QuantileBinsWhenValuesExceedTheBudget) {
  std::vector<double> v;
  for (int i = 1; i <= 1000; ++i) v.push_back(i * 0.001);
  const auto b = make_bins(v, 11);
  EXPECT_EQ(b.size(), 11u);
  EXPECT_EQ(b.upper.back(), 1.0);
  EXPECT_TRUE(std::is_sorted(b.upper.begin(), b.upper.end()));
  // Equal-frequency: each nonzero bin holds 100 values.
  std::vector<int> counts(b.size(), 0);
  for (double x : v) ++counts[b.bin_of(x)];
  for (std::size_t k = 1; k < counts.size(); ++k) EXPECT_EQ(counts[k], 100);
}

TEST(Histogram, BinSumsEqualColumnTotals) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> col(80), g(80), h(80), nonzero;
  for (std::size_t i = 0; i < 80; ++i) {
    col[i] = (i % 3 == 0) ? 0.0 : n(rng);
    if (col[i] != 0.0) nonzero.push_back(col[i]);
    g[i] = n(rng);
    h[i] = std::abs(n(rng));
  }
  for (std::size_t bins : {2u, 5u, 255u}) {
    const auto b = make_bins(nonzero, bins);
    const auto hist = build_histogram(b, col, g, h);
    double gs = 0, hs = 0, gw = 0, hw = 0;
    std::size_t count = 0;
    for (const auto& s : hist) {
      gs += s.grad;
      hs += s.hess;
      count += s.count;
    }
    for (std::size_t i = 0; i < 80; ++i) {
      gw += g[i];
      hw += h[i];
    }
    EXPECT_NEAR(gs, gw, 1e-12);
    EXPECT_NEAR(hs, hw, 1e-12);
    EXPECT_EQ(count, 80u);
  }
  const std::vector<double> zeros(10, 0.0), ones(10, 1.0);
  const auto hist = build_histogram(make_bins(std::vector<double>{}, 8), zeros, ones, ones);
  ASSERT_EQ(hist.size(), 1u);
  EXPECT_EQ(hist[0].count, 10u);
}

TEST(FindBestSplit, PureGradientsGiveNoSplit) {
  const std::vector<double> col{-1, -1, 1, 1, 2}, g(5, 0.3), h(5, 0.25);
  const std::vector<FeatureBins> bins{make_bins(col, 255)};
  const std::vector<std::vector<BinStats>> hist{build_histogram(bins[0], col, g, h)};
  EXPECT_FALSE(find_best_split(hist, bins, 1.0, 1).has_value());
}

TEST(FindBestSplit, SignDatasetSplitsBetweenTheTwoValues) {
  // y = 1{x > 0}, x in {-1, +1}, gradients at p = 0.5.
  const std::vector<double> col{-1, -1, -1, 1, 1, 1};
  std::vector<double> g, h(6, 0.25);
  for (double x : col) g.push_back(0.5 - (x > 0 ? 1.0 : 0.0));
  const std::vector<FeatureBins> bins{make_bins(col, 255)};
  const std::vector<std::vector<BinStats>> hist{build_histogram(bins[0], col, g, h)};
  const auto s = find_best_split(hist, bins, 1.0, 1);
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(s->threshold, -1.0);
  // G_L = 1.5, G_R = -1.5, H_L = H_R = 0.75.
  EXPECT_NEAR(s->gain, 0.5 * (2.25 / 1.75 + 2.25 / 1.75), 1e-12);
  EXPECT_FALSE(find_best_split(hist, bins, 1.0, 4).has_value());
}

TEST(FindBestSplit, TiesGoToTheLowestColumn) {
  const std::vector<double> col{-1, -1, 1, 1};
  const std::vector<double> g{0.5, 0.5, -0.5, -0.5}, h(4, 0.25);
  const auto b = make_bins(col, 255);
  const std::vector<FeatureBins> bins{b, b, b};
  const auto one = build_histogram(b, col, g, h);
  const std::vector<std::vector<BinStats>> hist{one, one, one};
  const auto s = find_best_split(hist, bins, 1.0, 1);
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(s->column, 0u);
  EXPECT_TRUE(gain_improves(1.0, 0.5));
  EXPECT_FALSE(gain_improves(1.0 + 1e-14, 1.0));
}

TEST(SplitGain, FormulaByHand) {
  EXPECT_NEAR(split_gain(1.0, 2.0, -3.0, 4.0, 0.5), 0.5 * (1.0 / 2.5 + 9.0 / 4.5 - 4.0 / 6.5), 1e-15);
}
