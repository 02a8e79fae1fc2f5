#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "authentext/config.hpp"
#include "authentext/corpus.hpp"

namespace authentext {

/// sum_v w'_v p_{v,d} with w' = w / sum(w). Error(input) on ragged voters,
/// negative or non-finite weights, or all-zero weights.
std::vector<double> soft_vote(std::span<const std::vector<double>> probas,
                              std::span<const double> weights);

/// Mid-ranks (average rank for ties, 0-based) scaled by 1/(n-1) into [0, 1].
/// Error(input) when n < 2.
std::vector<double> fractional_ranks(std::span<const double> scores);

/// soft_vote over each voter's fractional_ranks.
std::vector<double> rank_average(std::span<const std::vector<double>> probas,
                                 std::span<const double> weights);

std::vector<double> combine(CombineRule rule, std::span<const std::vector<double>> probas,
                            std::span<const double> weights);

/// Document id -> score in [0, 1].
using ExternalScores = std::map<std::string, double>;

/// CSV with header `id,score`. Error(parse) with the line number on bad
/// rows, out-of-range scores or duplicate ids.
ExternalScores parse_external_scores(std::string_view data);
ExternalScores load_external_scores(const std::filesystem::path& path);

/// The `id,score` file written by predict; scores use the shortest decimal
/// that reads back to the same double.
std::string format_scores(std::span<const Document> documents, std::span<const double> scores);

/// Scores in document order; Error(mismatch) listing the ids not covered.
std::vector<double> align_scores(const ExternalScores& scores, std::span<const Document> documents);

struct VoterSpec {
  std::optional<std::filesystem::path> model;   // model bundle
  std::optional<std::filesystem::path> scores;  // external score file
  double weight = 1.0;
};

/// JSON: {"combine": "probability_mean" | "rank_mean", "tokenizer": path,
/// "voters": [{"model": path, "weight": w} | {"scores": path, "weight": w}]}.
/// Relative paths resolve against the spec file's directory. The tokenizer
/// is required once any voter is a model.
struct EnsembleSpec {
  CombineRule combine = CombineRule::probability_mean;
  std::optional<std::filesystem::path> tokenizer;
  std::vector<VoterSpec> voters;
};

EnsembleSpec parse_ensemble_spec(std::string_view bytes, const std::filesystem::path& base_dir);
EnsembleSpec load_ensemble_spec(const std::filesystem::path& path);
std::string dump_ensemble_spec(const EnsembleSpec& spec, const std::filesystem::path& base_dir);

std::vector<double> ensemble_weights(const EnsembleSpec& spec);

/// Per-voter scores for `documents`, in spec order.
std::vector<std::vector<double>> score_voters(const EnsembleSpec& spec,
                                              std::span<const Document> documents,
                                              unsigned threads = 1);

std::vector<double> run_ensemble(const EnsembleSpec& spec, std::span<const Document> documents,
                                 unsigned threads = 1);

struct WeightSearch {
  std::vector<double> weights;
  double auc = 0.0;
};

/// Exhaustive search of the simplex grid {k * step : sum = 1} for the
/// weights maximizing AUC on `labels`; the first maximum in lexicographic
/// order of the weight vector wins. At most 4 voters.
WeightSearch grid_search_weights(std::span<const std::vector<double>> probas,
                                 std::span<const Label> labels, CombineRule rule, double step = 0.1);

}  // namespace authentext
