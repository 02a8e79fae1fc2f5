#include "authentext/ensemble.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "authentext/csv.hpp"
#include "authentext/error.hpp"
#include "authentext/io.hpp"
#include "authentext/metrics.hpp"
#include "authentext/pipeline.hpp"
#include "codec.hpp"

namespace authentext {

namespace {

void check_voters(std::span<const std::vector<double>> probas, std::span<const double> weights) {
  if (probas.empty()) throw Error(ErrorCode::input, "an ensemble needs at least one voter");
  if (probas.size() != weights.size()) {
    throw Error(ErrorCode::input, std::to_string(probas.size()) + " voters but " +
                                      std::to_string(weights.size()) + " weights");
  }
  for (std::size_t v = 1; v < probas.size(); ++v) {
    if (probas[v].size() != probas[0].size()) {
      throw Error(ErrorCode::input, "voter " + std::to_string(v) + " scored " +
                                        std::to_string(probas[v].size()) + " documents, voter 0 scored " +
                                        std::to_string(probas[0].size()));
    }
  }
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw Error(ErrorCode::input, "voter weights must be finite and >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::input, "at least one voter weight must be positive");
}

// Weight shares rounded to multiples of 2^-32, so that rescaling every
// weight by the same factor reproduces the same shares bit for bit.
std::vector<double> quantized_shares(std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<double> shares;
  shares.reserve(weights.size());
  for (double w : weights) shares.push_back(std::round(w / total * 4294967296.0));
  return shares;
}

}  // namespace

std::vector<double> soft_vote(std::span<const std::vector<double>> probas,
                              std::span<const double> weights) {
  check_voters(probas, weights);
  const auto shares = quantized_shares(weights);
  const double denom = std::accumulate(shares.begin(), shares.end(), 0.0);
  const std::size_t n = probas[0].size();
  std::vector<double> out(n);
  for (std::size_t d = 0; d < n; ++d) {
    double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t v = 0; v < probas.size(); ++v) {
      if (shares[v] == 0.0) continue;
      const double p = probas[v][d];
      sum += shares[v] * p;
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
    out[d] = std::clamp(sum / denom, lo, hi);
  }
  return out;
}

std::vector<double> fractional_ranks(std::span<const double> scores) {
  const std::size_t n = scores.size();
  if (n < 2) throw Error(ErrorCode::input, "rank averaging needs at least 2 documents");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = mid / static_cast<double>(n - 1);
    i = j;
  }
  return ranks;
}

std::vector<double> rank_average(std::span<const std::vector<double>> probas,
                                 std::span<const double> weights) {
  check_voters(probas, weights);
  std::vector<std::vector<double>> ranks;
  ranks.reserve(probas.size());
  for (const auto& p : probas) ranks.push_back(fractional_ranks(p));
  return soft_vote(ranks, weights);
}

std::vector<double> combine(CombineRule rule, std::span<const std::vector<double>> probas,
                            std::span<const double> weights) {
  return rule == CombineRule::rank_mean ? rank_average(probas, weights) : soft_vote(probas, weights);
}

ExternalScores parse_external_scores(std::string_view data) {
  const auto records = csv::parse(data);
  if (records.empty()) throw Error(ErrorCode::parse, "score file is empty (expected header id,score)");
  if (records[0].fields != std::vector<std::string>{"id", "score"}) {
    throw Error(ErrorCode::parse, "line " + std::to_string(records[0].line) +
                                      ": score file header must be id,score");
  }
  ExternalScores out;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& r = records[i];
    const std::string where = "line " + std::to_string(r.line) + ": ";
    if (r.fields.size() != 2) {
      throw Error(ErrorCode::parse, where + "expected 2 fields, found " + std::to_string(r.fields.size()));
    }
    const std::string& id = r.fields[0];
    const std::string& field = r.fields[1];
    if (id.empty()) throw Error(ErrorCode::parse, where + "empty id");
    double score = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), score);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
      throw Error(ErrorCode::parse, where + "score '" + field + "' is not a decimal number");
    }
    if (!(score >= 0.0 && score <= 1.0)) {
      throw Error(ErrorCode::parse, where + "score " + field + " for id '" + id + "' is outside [0, 1]");
    }
    if (!out.emplace(id, score).second) {
      throw Error(ErrorCode::parse, where + "duplicate id '" + id + "'");
    }
  }
  return out;
}

ExternalScores load_external_scores(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    return parse_external_scores(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string format_scores(std::span<const Document> documents, std::span<const double> scores) {
  if (documents.size() != scores.size()) {
    throw Error(ErrorCode::mismatch, "documents and scores differ in length");
  }
  std::string out = "id,score\n";
  char buf[64];
  for (std::size_t i = 0; i < documents.size(); ++i) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, scores[i]);
    out += csv::escape(documents[i].id);
    out += ',';
    out.append(buf, ptr);
    out += '\n';
  }
  return out;
}

std::vector<double> align_scores(const ExternalScores& scores, std::span<const Document> documents) {
  std::vector<double> out;
  out.reserve(documents.size());
  std::vector<std::string> missing;
  for (const auto& d : documents) {
    auto it = scores.find(d.id);
    if (it == scores.end()) {
      missing.push_back(d.id);
    } else {
      out.push_back(it->second);
    }
  }
  if (!missing.empty()) {
    std::string list;
    const std::size_t shown = std::min<std::size_t>(missing.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) list += (i ? ", " : "") + missing[i];
    if (shown < missing.size()) list += ", ... (" + std::to_string(missing.size() - shown) + " more)";
    throw Error(ErrorCode::mismatch, std::to_string(missing.size()) + " document id(s) missing from scores: " +
                                         list);
  }
  return out;
}

EnsembleSpec parse_ensemble_spec(std::string_view bytes, const std::filesystem::path& base_dir) {
  detail::json doc;
  try {
    doc = detail::json::parse(bytes);
  } catch (const detail::json::parse_error& e) {
    throw Error(ErrorCode::config, "ensemble spec is not valid JSON (" + std::string(e.what()) + ")");
  }
  detail::Reader r(doc, "", ErrorCode::config);
  EnsembleSpec spec;
  if (r.has("combine")) {
    const std::string name = r.string("combine");
    try {
      spec.combine = combine_rule_from_name(name);
    } catch (const Error&) {
      r.fail("combine", "must be probability_mean or rank_mean, got '" + name + "'");
    }
  }
  if (r.has("tokenizer")) spec.tokenizer = base_dir / r.string("tokenizer");
  const detail::json& voters = r.raw("voters");
  r.finish();
  if (!voters.is_array() || voters.empty()) r.fail("voters", "must be a non-empty array");
  for (std::size_t i = 0; i < voters.size(); ++i) {
    detail::Reader v(voters[i], "voters[" + std::to_string(i) + "]", ErrorCode::config);
    VoterSpec voter;
    if (v.has("model") == v.has("scores")) v.fail("model", "or 'scores' must be given (exactly one)");
    if (v.has("model")) voter.model = base_dir / v.string("model");
    if (v.has("scores")) voter.scores = base_dir / v.string("scores");
    v.read("weight", voter.weight);
    v.finish();
    if (voter.weight < 0.0) v.fail("weight", "must be >= 0");
    if (voter.model && !spec.tokenizer) {
      throw Error(ErrorCode::config, "key 'tokenizer' is required when a voter is a model");
    }
    spec.voters.push_back(std::move(voter));
  }
  const auto w = ensemble_weights(spec);
  if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) {
    throw Error(ErrorCode::config, "at least one voter weight must be positive");
  }
  return spec;
}

EnsembleSpec load_ensemble_spec(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    return parse_ensemble_spec(bytes, path.parent_path());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string dump_ensemble_spec(const EnsembleSpec& spec, const std::filesystem::path& base_dir) {
  auto rel = [&](const std::filesystem::path& p) {
    const auto r = p.lexically_relative(base_dir);
    return (r.empty() ? p : r).generic_string();
  };
  detail::json voters = detail::json::array();
  for (const auto& v : spec.voters) {
    detail::json entry;
    if (v.model) entry["model"] = rel(*v.model);
    if (v.scores) entry["scores"] = rel(*v.scores);
    entry["weight"] = v.weight;
    voters.push_back(std::move(entry));
  }
  detail::json doc = {{"combine", combine_rule_name(spec.combine)}, {"voters", std::move(voters)}};
  if (spec.tokenizer) doc["tokenizer"] = rel(*spec.tokenizer);
  return detail::canonical(doc);
}

std::vector<double> ensemble_weights(const EnsembleSpec& spec) {
  std::vector<double> w;
  w.reserve(spec.voters.size());
  for (const auto& v : spec.voters) w.push_back(v.weight);
  return w;
}

std::vector<std::vector<double>> score_voters(const EnsembleSpec& spec,
                                              std::span<const Document> documents, unsigned threads) {
  std::optional<LoadedTokenizer> tokenizer;
  std::vector<TokenSequence> tokens;
  std::vector<std::vector<double>> out;
  for (const auto& v : spec.voters) {
    if (v.scores) {
      const auto scores = load_external_scores(*v.scores);
      try {
        out.push_back(align_scores(scores, documents));
      } catch (const Error& e) {
        throw Error(e.code(), v.scores->string() + ": " + e.what());
      }
      continue;
    }
    const ModelBundle bundle = load_bundle(*v.model);
    if (!tokenizer) {
      tokenizer = load_tokenizer(*spec.tokenizer);
      std::vector<std::string> texts;
      texts.reserve(documents.size());
      for (const auto& d : documents) texts.push_back(d.text);
      tokens = tokenizer->tokenizer.encode_all(texts, threads);
    }
    try {
      check_vocab_ref(bundle, *tokenizer);
    } catch (const Error& e) {
      throw Error(e.code(), v.model->string() + ": " + e.what());
    }
    out.push_back(score_tokens(bundle, tokens, threads));
  }
  return out;
}

std::vector<double> run_ensemble(const EnsembleSpec& spec, std::span<const Document> documents,
                                 unsigned threads) {
  const auto probas = score_voters(spec, documents, threads);
  if (documents.empty()) return {};
  return combine(spec.combine, probas, ensemble_weights(spec));
}

WeightSearch grid_search_weights(std::span<const std::vector<double>> probas,
                                 std::span<const Label> labels, CombineRule rule, double step) {
  const std::size_t n_voters = probas.size();
  if (n_voters == 0 || n_voters > 4) {
    throw Error(ErrorCode::usage, "weight search supports 1 to 4 voters, got " + std::to_string(n_voters));
  }
  const double steps = 1.0 / step;
  if (!(step > 0.0 && step <= 1.0) || std::abs(steps - std::round(steps)) > 1e-9) {
    throw Error(ErrorCode::usage, "grid step must divide 1 into a whole number of steps");
  }
  const auto k_total = static_cast<int>(std::round(steps));

  WeightSearch best;
  std::optional<AucFraction> best_auc;
  std::vector<int> k(n_voters, 0);
  auto visit = [&] {
    std::vector<double> w(n_voters);
    for (std::size_t v = 0; v < n_voters; ++v) w[v] = static_cast<double>(k[v]) / k_total;
    const auto auc = roc_auc_fraction(combine(rule, probas, w), labels);
    if (!best_auc || auc.numerator > best_auc->numerator) {
      best_auc = auc;
      best.weights = std::move(w);
      best.auc = auc.value();
    }
  };
  // Lexicographic enumeration of non-negative k with sum k_total.
  auto recurse = [&](auto&& self, std::size_t v, int remaining) -> void {
    if (v + 1 == n_voters) {
      k[v] = remaining;
      visit();
      return;
    }
    for (int x = 0; x <= remaining; ++x) {
      k[v] = x;
      self(self, v + 1, remaining - x);
    }
  };
  recurse(recurse, 0, k_total);
  return best;
}

}  // namespace authentext
