#include "authentext/config.hpp"

#include <cmath>

#include "authentext/error.hpp"
#include "authentext/hash.hpp"
#include "authentext/io.hpp"
#include "codec.hpp"

namespace authentext {

using detail::json;
using detail::Reader;

std::string_view combine_rule_name(CombineRule rule) noexcept {
  return rule == CombineRule::probability_mean ? "probability_mean" : "rank_mean";
}

CombineRule combine_rule_from_name(std::string_view name) {
  if (name == "probability_mean") return CombineRule::probability_mean;
  if (name == "rank_mean") return CombineRule::rank_mean;
  throw Error(ErrorCode::usage, "unknown combiner '" + std::string(name) +
                                    "' (valid: probability_mean, rank_mean)");
}

namespace {

template <typename Enum, typename FromName>
void read_enum(Reader& r, const std::string& key, Enum& out, FromName from_name, const char* valid) {
  if (!r.has(key)) return;
  const std::string v = r.string(key);
  try {
    out = from_name(v);
  } catch (const Error&) {
    r.fail(key, "must be one of " + std::string(valid) + ", got '" + v + "'");
  }
}

}  // namespace

RunConfig parse_run_config(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::config, "config is not valid JSON (" + std::string(e.what()) + ")");
  }
  RunConfig c;
  Reader r(doc, "", ErrorCode::config);
  if (r.has("seed")) c.seed = r.unsigned_integer("seed");
  if (r.has("tokenizer")) {
    Reader s = r.object("tokenizer");
    read_enum(s, "unit", c.tokenizer.unit, token_unit_from_name, "bpe, word");
    s.read("vocab_size", c.tokenizer.vocab_size);
    s.read("max_merges", c.tokenizer.max_merges);
    s.finish();
  }
  if (r.has("features")) {
    Reader s = r.object("features");
    detail::read_into(s, c.features);
  }
  if (r.has("split")) {
    Reader s = r.object("split");
    s.read("test_fraction", c.split.test_fraction);
    s.finish();
  }
  if (r.has("naive_bayes")) {
    Reader s = r.object("naive_bayes");
    s.read("alpha", c.naive_bayes.alpha);
    s.finish();
  }
  if (r.has("sgd_linear")) {
    Reader s = r.object("sgd_linear");
    detail::read_into(s, c.sgd_linear);
  }
  if (r.has("gbdt")) {
    Reader s = r.object("gbdt");
    detail::read_into(s, c.gbdt);
  }
  if (r.has("ensemble")) {
    Reader s = r.object("ensemble");
    read_enum(s, "combine", c.ensemble.combine, combine_rule_from_name, "probability_mean, rank_mean");
    s.read("grid_step", c.ensemble.grid_step);
    s.finish();
  }
  r.finish();
  c.sgd_linear.seed = c.seed;
  validate(c);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  try {
    return parse_run_config(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::io) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& key, const std::string& what) {
    throw Error(ErrorCode::config, "key '" + key + "' " + what);
  };
  if (c.tokenizer.vocab_size < 3) fail("tokenizer.vocab_size", "must be >= 3");
  if (c.features.ngram_min < 1 || c.features.ngram_min > c.features.ngram_max) {
    fail("features.ngram_min", "must satisfy 1 <= ngram_min <= ngram_max");
  }
  if (c.features.min_df < 1) fail("features.min_df", "must be >= 1");
  if (!(c.split.test_fraction > 0.0 && c.split.test_fraction < 1.0)) {
    fail("split.test_fraction", "must lie strictly between 0 and 1");
  }
  if (!(c.naive_bayes.alpha > 0.0)) fail("naive_bayes.alpha", "must be > 0");
  if (!(c.sgd_linear.eta0 > 0.0)) fail("sgd_linear.eta0", "must be > 0");
  if (!(c.sgd_linear.l2 >= 0.0)) fail("sgd_linear.l2", "must be >= 0");
  if (c.sgd_linear.epochs < 1) fail("sgd_linear.epochs", "must be >= 1");
  validate(c.gbdt);
  const double steps = 1.0 / c.ensemble.grid_step;
  if (!(c.ensemble.grid_step > 0.0 && c.ensemble.grid_step <= 1.0) ||
      std::abs(steps - std::round(steps)) > 1e-9) {
    fail("ensemble.grid_step", "must divide 1 into a whole number of steps");
  }
}

std::string dump_run_config(const RunConfig& c) {
  const json doc = {
      {"seed", c.seed},
      {"tokenizer",
       {{"unit", token_unit_name(c.tokenizer.unit)},
        {"vocab_size", c.tokenizer.vocab_size},
        {"max_merges", c.tokenizer.max_merges}}},
      {"features", detail::to_json(c.features)},
      {"split", {{"test_fraction", c.split.test_fraction}}},
      {"naive_bayes", {{"alpha", c.naive_bayes.alpha}}},
      {"sgd_linear", detail::to_json(c.sgd_linear)},
      {"gbdt", detail::to_json(c.gbdt)},
      {"ensemble",
       {{"combine", combine_rule_name(c.ensemble.combine)}, {"grid_step", c.ensemble.grid_step}}},
  };
  return detail::canonical(doc);
}

std::string config_hash(const RunConfig& c) { return sha256_hex(dump_run_config(c)); }

}  // namespace authentext
