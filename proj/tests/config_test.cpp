#include <gtest/gtest.h>

#include <json.hpp>

#include "authentext/config.hpp"
#include "authentext/error.hpp"
#include "authentext/io.hpp"
#include "support.hpp"

using namespace authentext;

namespace {

std::string config_error(std::string_view bytes) {
  try {
    parse_run_config(bytes);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::config) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "accepted " << bytes;
  return {};
}

}  // namespace

TEST(RunConfig, EmptyObjectGivesDefaults) {
  const auto c = parse_run_config("{}");
  RunConfig want;
  want.sgd_linear.seed = want.seed;
  EXPECT_EQ(c, want);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.features.ngram_max, 3u);
  EXPECT_EQ(c.gbdt.n_trees, 200u);
  EXPECT_EQ(c.ensemble.combine, CombineRule::probability_mean);
}

TEST(RunConfig, PartialOverridesAndSeedPropagation) {
  const auto c = parse_run_config(R"({"seed": 7, "gbdt": {"variant": "symmetric", "depth": 4},
                                      "tokenizer": {"unit": "word"}, "ensemble": {"combine": "rank_mean"}})");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.sgd_linear.seed, 7u);
  EXPECT_EQ(c.gbdt.variant, TreeGrowth::symmetric);
  EXPECT_EQ(c.gbdt.depth, 4u);
  EXPECT_EQ(c.gbdt.n_trees, 200u);
  EXPECT_EQ(c.tokenizer.unit, TokenUnit::word);
  EXPECT_EQ(c.ensemble.combine, CombineRule::rank_mean);
}

TEST(RunConfig, ErrorsNameTheKeyPath) {
  EXPECT_NE(config_error(R"({"gbdt": {"n_tres": 3}})").find("'gbdt.n_tres' is not recognized"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"colour": 1})").find("'colour'"), std::string::npos);
  EXPECT_NE(config_error(R"({"gbdt": {"n_trees": "many"}})").find("gbdt.n_trees"), std::string::npos);
  EXPECT_NE(config_error(R"({"gbdt": {"n_trees": -1}})").find("gbdt.n_trees"), std::string::npos);
  EXPECT_NE(config_error(R"({"features": {"l2_normalize": 1}})").find("features.l2_normalize"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"gbdt": {"variant": "deep"}})").find("gbdt.variant"), std::string::npos);
  EXPECT_NE(config_error(R"({"tokenizer": {"vocab_size": 2}})").find("tokenizer.vocab_size"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"ensemble": {"grid_step": 0.3}})").find("ensemble.grid_step"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"gbdt": {"n_bins": 1}})").find("gbdt.n_bins"), std::string::npos);
  config_error("[1, 2]");
  config_error("{\"seed\": ");
}

TEST(RunConfig, DumpRoundTripsAndHashIsStable) {
  RunConfig c;
  c.seed = 9;
  c.sgd_linear.seed = 9;
  c.gbdt.learning_rate = 0.07;
  c.features.min_df = 1;
  const std::string dumped = dump_run_config(c);
  EXPECT_EQ(parse_run_config(dumped), c);
  EXPECT_EQ(dump_run_config(parse_run_config(dumped)), dumped);
  EXPECT_EQ(config_hash(c), config_hash(parse_run_config(dumped)));
  EXPECT_EQ(config_hash(c).size(), 64u);
  RunConfig d = c;
  d.gbdt.learning_rate = 0.08;
  EXPECT_NE(config_hash(c), config_hash(d));
  const auto doc = nlohmann::json::parse(dumped);
  EXPECT_TRUE(doc["gbdt"].contains("max_leaves"));
  EXPECT_FALSE(doc["sgd_linear"].contains("seed"));
}

TEST(RunConfig, LoadPrefixesPath) {
  test::TempDir dir;
  const auto p = dir / "run.json";
  write_file(p, R"({"split": {"test_fraction": 2}})");
  try {
    load_run_config(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::config);
    EXPECT_NE(std::string(e.what()).find(p.string()), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("split.test_fraction"), std::string::npos);
  }
  EXPECT_THROW(load_run_config(dir / "absent.json"), Error);
}

TEST(CombineRule, Names) {
  EXPECT_EQ(combine_rule_from_name("rank_mean"), CombineRule::rank_mean);
  EXPECT_EQ(combine_rule_name(CombineRule::probability_mean), "probability_mean");
  EXPECT_THROW(combine_rule_from_name("median"), Error);
}
