#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "authentext/ensemble.hpp"
#include "authentext/error.hpp"
#include "authentext/io.hpp"
#include "authentext/metrics.hpp"
#include "support.hpp"

using namespace authentext;

namespace {

std::vector<std::vector<double>> random_probas(std::mt19937_64& rng, std::size_t voters, std::size_t docs) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> p(voters, std::vector<double>(docs));
  for (auto& v : p) {
    for (double& x : v) x = u(rng);
  }
  return p;
}

std::vector<Document> docs(std::initializer_list<const char*> ids) {
  std::vector<Document> out;
  for (const char* id : ids) out.push_back({id, "text"});
  return out;
}

}  // namespace

TEST(SoftVote, WorkedExamples) {
  const std::vector<std::vector<double>> two{{0.2}, {0.8}};
  EXPECT_DOUBLE_EQ(soft_vote(two, std::vector<double>{1.0, 1.0})[0], 0.5);
  const std::vector<std::vector<double>> p{{0.1, 0.7, 0.4}, {0.9, 0.3, 0.2}};
  EXPECT_EQ(soft_vote(p, std::vector<double>{2.0, 6.0}), soft_vote(p, std::vector<double>{1.0, 3.0}));
  EXPECT_NEAR(soft_vote(p, std::vector<double>{1.0, 3.0})[0], 0.25 * 0.1 + 0.75 * 0.9, 1e-15);
  const std::vector<std::vector<double>> one{{0.1, 0.7, 0.4}};
  EXPECT_EQ(soft_vote(one, std::vector<double>{5.0}), one[0]);
}

TEST(SoftVote, ScaleInvarianceIsBitExact) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> w(0.1, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_probas(rng, 1 + trial % 4, 50);
    std::vector<double> weights(p.size());
    for (double& x : weights) x = w(rng);
    const auto base = soft_vote(p, weights);
    for (double c : {0.5, 3.0, 100.0}) {
      auto scaled = weights;
      for (double& x : scaled) x *= c;
      ASSERT_EQ(soft_vote(p, scaled), base);
    }
  }
}

TEST(SoftVote, IdentityAndConvexHull) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> w(0.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = random_probas(rng, 2 + trial % 3, 40);
    std::vector<double> weights(p.size());
    for (double& x : weights) x = w(rng);
    weights[0] += 0.1;
    const auto out = soft_vote(p, weights);
    for (std::size_t d = 0; d < out.size(); ++d) {
      double lo = 1.0, hi = 0.0;
      for (std::size_t v = 0; v < p.size(); ++v) {
        if (weights[v] > 0.0) {
          lo = std::min(lo, p[v][d]);
          hi = std::max(hi, p[v][d]);
        }
      }
      ASSERT_GE(out[d], lo);
      ASSERT_LE(out[d], hi);
    }
    for (auto& v : p) v = p[0];
    ASSERT_EQ(soft_vote(p, weights), p[0]);
  }
}

TEST(SoftVote, VoterPermutation) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = random_probas(rng, 4, 30);
    std::vector<double> weights{0.4, 1.3, 2.2, 0.7};
    const auto base = soft_vote(p, weights);
    std::vector<std::size_t> order{0, 1, 2, 3};
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::vector<double>> q;
    std::vector<double> wq;
    for (auto k : order) {
      q.push_back(p[k]);
      wq.push_back(weights[k]);
    }
    const auto permuted = soft_vote(q, wq);
    for (std::size_t d = 0; d < base.size(); ++d) ASSERT_NEAR(permuted[d], base[d], 1e-12);
  }
}

TEST(SoftVote, RejectsDegenerateInput) {
  const std::vector<std::vector<double>> p{{0.1, 0.2}, {0.3}};
  EXPECT_THROW(soft_vote(p, std::vector<double>{1.0, 1.0}), Error);
  const std::vector<std::vector<double>> q{{0.1}, {0.3}};
  EXPECT_THROW(soft_vote(q, std::vector<double>{0.0, 0.0}), Error);
  EXPECT_THROW(soft_vote(q, std::vector<double>{-1.0, 2.0}), Error);
  EXPECT_THROW(soft_vote(q, std::vector<double>{1.0}), Error);
  EXPECT_THROW(soft_vote(q, std::vector<double>{NAN, 1.0}), Error);
}

TEST(FractionalRanks, MidRanksScaledToUnitInterval) {
  EXPECT_EQ(fractional_ranks(std::vector<double>{0.3, 0.1, 0.2}), (std::vector<double>{1.0, 0.0, 0.5}));
  EXPECT_EQ(fractional_ranks(std::vector<double>{0.5, 0.5, 0.9}), (std::vector<double>{0.25, 0.25, 1.0}));
  EXPECT_THROW(fractional_ranks(std::vector<double>{0.5}), Error);
}

TEST(RankAverage, OppositeVotersTie) {
  const std::vector<std::vector<double>> p{{0.1, 0.2, 0.3}, {0.9, 0.8, 0.7}};
  EXPECT_EQ(rank_average(p, std::vector<double>{1.0, 1.0}), (std::vector<double>{0.5, 0.5, 0.5}));
}

TEST(RankAverage, SingleVoterKeepsAucAndMonotoneInvariance) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = random_probas(rng, 3, 60);
    std::vector<Label> y(60);
    for (auto& l : y) l = static_cast<Label>(rng() % 2);
    y[0] = 0;
    y[1] = 1;
    const std::vector<std::vector<double>> one{p[0]};
    ASSERT_EQ(roc_auc(rank_average(one, std::vector<double>{2.0}), y), roc_auc(p[0], y));
    const std::vector<double> w{1.0, 0.5, 2.0};
    const auto base = rank_average(p, w);
    for (double& x : p[1]) x = std::pow(x, 3.0) * 10.0 - 4.0;
    ASSERT_EQ(rank_average(p, w), base);
  }
}

TEST(ExternalScores, ParsesAndRejectsBadRows) {
  const auto s = parse_external_scores("id,score\na,0.25\nb,1\nc,0\n");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.at("a"), 0.25);
  auto parse_error = [](std::string_view data) {
    try {
      parse_external_scores(data);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::parse);
      return std::string(e.what());
    }
    ADD_FAILURE() << "accepted " << data;
    return std::string();
  };
  EXPECT_NE(parse_error("id,score\na,0.5\nb,1.5\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("id,score\na,0.5\na,0.6\n").find("duplicate"), std::string::npos);
  EXPECT_NE(parse_error("id,score\na,high\n").find("line 2"), std::string::npos);
  parse_error("id,prob\na,0.5\n");
  parse_error("");
  parse_error("id,score\na\n");
}

TEST(ExternalScores, FormatReadsBackExactly) {
  const auto d = docs({"x", "y", "z"});
  const std::vector<double> s{0.1, 1.0 / 3.0, 0.9999999999999999};
  const auto back = parse_external_scores(format_scores(d, s));
  EXPECT_EQ(align_scores(back, d), s);
}

TEST(ExternalScores, AlignListsMissingIds) {
  const auto s = parse_external_scores("id,score\na,0.5\n");
  try {
    align_scores(s, docs({"a", "b", "c"}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::mismatch);
    const std::string what = e.what();
    EXPECT_NE(what.find("b"), std::string::npos);
    EXPECT_NE(what.find("c"), std::string::npos);
  }
}

TEST(EnsembleSpecFile, ParseDumpAndErrors) {
  const auto spec = parse_ensemble_spec(
      R"({"combine": "rank_mean", "tokenizer": "vocab.json",
          "voters": [{"model": "nb.json", "weight": 2}, {"scores": "s.csv"}]})",
      "/data");
  EXPECT_EQ(spec.combine, CombineRule::rank_mean);
  EXPECT_EQ(*spec.tokenizer, std::filesystem::path("/data/vocab.json"));
  ASSERT_EQ(spec.voters.size(), 2u);
  EXPECT_EQ(*spec.voters[0].model, std::filesystem::path("/data/nb.json"));
  EXPECT_EQ(ensemble_weights(spec), (std::vector<double>{2.0, 1.0}));
  const auto again = parse_ensemble_spec(dump_ensemble_spec(spec, "/data"), "/data");
  EXPECT_EQ(again.voters[1].scores, spec.voters[1].scores);
  EXPECT_EQ(again.tokenizer, spec.tokenizer);
  auto config_error = [](std::string_view bytes) {
    try {
      parse_ensemble_spec(bytes, ".");
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::config);
      return std::string(e.what());
    }
    ADD_FAILURE() << "accepted " << bytes;
    return std::string();
  };
  EXPECT_NE(config_error(R"({"voters": [{"model": "m.json"}]})").find("tokenizer"), std::string::npos);
  EXPECT_NE(config_error(R"({"voters": [{"scores": "s", "wieght": 1}]})").find("voters[0].wieght"),
            std::string::npos);
  config_error(R"({"voters": []})");
  config_error(R"({"voters": [{"scores": "s", "model": "m"}]})");
  config_error(R"({"voters": [{"scores": "s", "weight": 0}]})");
  config_error(R"({"combine": "max", "voters": [{"scores": "s"}]})");
}

TEST(EnsembleRun, ExternalScoreVotersFromDisk) {
  test::TempDir dir;
  write_file(dir / "a.csv", "id,score\nd1,0.2\nd2,0.6\n");
  write_file(dir / "b.csv", "id,score\nd2,0.4\nd1,0.8\n");
  write_file(dir / "spec.json", R"({"voters": [{"scores": "a.csv", "weight": 3}, {"scores": "b.csv"}]})");
  const auto spec = load_ensemble_spec(dir / "spec.json");
  const auto out = run_ensemble(spec, docs({"d1", "d2"}));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_NEAR(out[0], 0.75 * 0.2 + 0.25 * 0.8, 1e-15);
  EXPECT_NEAR(out[1], 0.75 * 0.6 + 0.25 * 0.4, 1e-15);
  EXPECT_THROW(run_ensemble(spec, docs({"d1", "d3"})), Error);
}

TEST(GridSearch, FindsBestCompositionAndPrefersFirst) {
  const std::vector<Label> y{0, 0, 1, 1};
  const std::vector<std::vector<double>> p{{0.9, 0.1, 0.2, 0.8}, {0.1, 0.2, 0.3, 0.4}};
  const auto best = grid_search_weights(p, y, CombineRule::probability_mean, 0.1);
  EXPECT_EQ(best.auc, 1.0);
  ASSERT_EQ(best.weights.size(), 2u);
  EXPECT_NEAR(best.weights[0], 0.0, 1e-12);
  EXPECT_NEAR(best.weights[1], 1.0, 1e-12);
  const std::vector<std::vector<double>> same{{0.1, 0.2, 0.3, 0.4}, {0.1, 0.2, 0.3, 0.4}};
  const auto tie = grid_search_weights(same, y, CombineRule::rank_mean, 0.5);
  EXPECT_NEAR(tie.weights[0], 0.0, 1e-12);
  EXPECT_THROW(grid_search_weights(std::vector<std::vector<double>>(5, p[0]), y,
                                   CombineRule::probability_mean, 0.5),
               Error);
  EXPECT_THROW(grid_search_weights(p, y, CombineRule::probability_mean, 0.3), Error);
}
