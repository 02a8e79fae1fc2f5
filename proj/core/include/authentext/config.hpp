#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "authentext/features.hpp"
#include "authentext/gbdt.hpp"
#include "authentext/sgd_linear.hpp"
#include "authentext/tokenizer.hpp"

namespace authentext {

enum class CombineRule { probability_mean, rank_mean };

std::string_view combine_rule_name(CombineRule rule) noexcept;
CombineRule combine_rule_from_name(std::string_view name);

struct TokenizerSettings {
  TokenUnit unit = TokenUnit::bpe;
  std::size_t vocab_size = 5000;
  std::size_t max_merges = 0;

  friend bool operator==(const TokenizerSettings&, const TokenizerSettings&) = default;
};

struct SplitSettings {
  double test_fraction = 0.2;

  friend bool operator==(const SplitSettings&, const SplitSettings&) = default;
};

struct NaiveBayesSettings {
  double alpha = 1.0;

  friend bool operator==(const NaiveBayesSettings&, const NaiveBayesSettings&) = default;
};

struct EnsembleSettings {
  CombineRule combine = CombineRule::probability_mean;
  double grid_step = 0.1;

  friend bool operator==(const EnsembleSettings&, const EnsembleSettings&) = default;
};

/// Every knob of a run. A config file may set any subset of the keys below;
/// the rest keep these defaults.
///
///   seed
///   tokenizer.{unit, vocab_size, max_merges}
///   features.{ngram_min, ngram_max, min_df, sublinear_tf, l2_normalize}
///   split.test_fraction
///   naive_bayes.alpha
///   sgd_linear.{eta0, l2, epochs}
///   gbdt.{variant, n_trees, learning_rate, max_leaves, depth, n_bins,
///         min_data_in_leaf, lambda_l2}
///   ensemble.{combine, grid_step}
struct RunConfig {
  std::uint64_t seed = 42;
  TokenizerSettings tokenizer;
  TfidfConfig features;
  SplitSettings split;
  NaiveBayesSettings naive_bayes;
  SgdConfig sgd_linear;  // its seed is always overwritten by `seed`
  GbdtConfig gbdt;
  EnsembleSettings ensemble;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Strict JSON reader: unknown keys and wrongly typed values are
/// Error(config) naming the key path (e.g. "gbdt.n_trees").
RunConfig parse_run_config(std::string_view bytes);
RunConfig load_run_config(const std::filesystem::path& path);

/// Range checks shared by parsing and the CLI overrides.
void validate(const RunConfig& config);

/// Canonical JSON with every key spelled out.
std::string dump_run_config(const RunConfig& config);

/// SHA-256 of dump_run_config.
std::string config_hash(const RunConfig& config);

}  // namespace authentext
