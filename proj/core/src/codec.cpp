#include "codec.hpp"

#include <cmath>
#include <limits>

namespace authentext::detail {

Reader::Reader(const json& object, std::string path, ErrorCode code)
    : object_(object), path_(std::move(path)), code_(code) {
  if (!object_.is_object()) {
    throw Error(code_, (path_.empty() ? std::string("document") : "'" + path_ + "'") +
                           " must be an object");
  }
}

std::string Reader::key_path(const std::string& key) const {
  return path_.empty() ? key : path_ + "." + key;
}

void Reader::fail(const std::string& key, const std::string& what) const {
  throw Error(code_, "key '" + key_path(key) + "' " + what);
}

const json& Reader::raw(const std::string& key) { return require(key); }

const json& Reader::require(const std::string& key) {
  auto it = object_.find(key);
  if (it == object_.end()) fail(key, "is missing");
  seen_.insert(key);
  return *it;
}

double Reader::number(const std::string& key) {
  const json& v = require(key);
  if (!v.is_number()) fail(key, "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(key, "must be finite");
  return d;
}

std::uint64_t Reader::unsigned_integer(const std::string& key) {
  const json& v = require(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
  fail(key, "must be a non-negative integer");
}

std::string Reader::string(const std::string& key) {
  const json& v = require(key);
  if (!v.is_string()) fail(key, "must be a string");
  return v.get<std::string>();
}

Reader Reader::object(const std::string& key) {
  const json& v = require(key);
  if (!v.is_object()) fail(key, "must be an object");
  return Reader(v, key_path(key), code_);
}

void Reader::read(const std::string& key, double& out) {
  if (has(key)) out = number(key);
}

void Reader::read(const std::string& key, std::size_t& out) {
  if (has(key)) out = static_cast<std::size_t>(unsigned_integer(key));
}

void Reader::read(const std::string& key, bool& out) {
  if (!has(key)) return;
  const json& v = require(key);
  if (!v.is_boolean()) fail(key, "must be true or false");
  out = v.get<bool>();
}

void Reader::read(const std::string& key, std::string& out) {
  if (has(key)) out = string(key);
}

void Reader::finish() const {
  for (auto it = object_.begin(); it != object_.end(); ++it) {
    if (!seen_.contains(it.key())) {
      throw Error(code_, "key '" + key_path(it.key()) + "' is not recognized");
    }
  }
}

json parse_json(std::string_view bytes, std::string_view what) {
  try {
    return json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse, "truncated or malformed " + std::string(what) + " document (" +
                                      e.what() + ")");
  }
}

void check_format_version(const json& doc, int expected, std::string_view what) {
  if (!doc.is_object() || !doc.contains("format_version")) {
    throw Error(ErrorCode::parse, std::string(what) + " document has no format_version");
  }
  const json& v = doc["format_version"];
  if (!v.is_number_integer() || v.get<std::int64_t>() != expected) {
    throw Error(ErrorCode::version, "unsupported " + std::string(what) + " format_version " + v.dump() +
                                        " (expected " + std::to_string(expected) + ")");
  }
}

std::string canonical(const json& doc) { return doc.dump(1) + "\n"; }

json to_json(const TfidfConfig& c) {
  return {{"ngram_min", c.ngram_min},
          {"ngram_max", c.ngram_max},
          {"min_df", c.min_df},
          {"sublinear_tf", c.sublinear_tf},
          {"l2_normalize", c.l2_normalize}};
}

json to_json(const SgdConfig& c) { return {{"eta0", c.eta0}, {"l2", c.l2}, {"epochs", c.epochs}}; }

json to_json(const GbdtConfig& c) {
  return {{"variant", tree_growth_name(c.variant)},
          {"n_trees", c.n_trees},
          {"learning_rate", c.learning_rate},
          {"max_leaves", c.max_leaves},
          {"depth", c.depth},
          {"n_bins", c.n_bins},
          {"min_data_in_leaf", c.min_data_in_leaf},
          {"lambda_l2", c.lambda_l2}};
}

void read_into(Reader& r, TfidfConfig& c) {
  r.read("ngram_min", c.ngram_min);
  r.read("ngram_max", c.ngram_max);
  r.read("min_df", c.min_df);
  r.read("sublinear_tf", c.sublinear_tf);
  r.read("l2_normalize", c.l2_normalize);
  r.finish();
}

void read_into(Reader& r, SgdConfig& c) {
  r.read("eta0", c.eta0);
  r.read("l2", c.l2);
  r.read("epochs", c.epochs);
  r.finish();
}

void read_into(Reader& r, GbdtConfig& c) {
  if (r.has("variant")) {
    const std::string v = r.string("variant");
    try {
      c.variant = tree_growth_from_name(v);
    } catch (const Error& e) {
      r.fail("variant", "must be leaf_wise or symmetric, got '" + v + "'");
    }
  }
  r.read("n_trees", c.n_trees);
  r.read("learning_rate", c.learning_rate);
  r.read("max_leaves", c.max_leaves);
  r.read("depth", c.depth);
  r.read("n_bins", c.n_bins);
  r.read("min_data_in_leaf", c.min_data_in_leaf);
  r.read("lambda_l2", c.lambda_l2);
  r.finish();
}

json tfidf_to_json(const TfidfModel& model) {
  const auto& vocab = model.vocabulary();
  json ngrams = json::array();
  for (const auto& g : vocab.ngrams()) ngrams.push_back(g);
  json df = json::array();
  for (std::size_t d : vocab.df()) df.push_back(d);
  return {{"config", to_json(model.config())},
          {"document_count", vocab.document_count()},
          {"ngrams", std::move(ngrams)},
          {"df", std::move(df)}};
}

namespace {

template <typename T>
std::vector<T> array_of(const json& v, const Reader& r, const std::string& key) {
  if (!v.is_array()) r.fail(key, "must be an array");
  try {
    return v.get<std::vector<T>>();
  } catch (const json::exception&) {
    r.fail(key, "has elements of the wrong type");
  }
}

}  // namespace

TfidfModel tfidf_from_json(const json& doc, const std::string& path) {
  Reader r(doc, path, ErrorCode::parse);
  TfidfConfig config;
  Reader cr = r.object("config");
  read_into(cr, config);
  const auto n = static_cast<std::size_t>(r.unsigned_integer("document_count"));
  auto ngrams = array_of<Ngram>(r.raw("ngrams"), r, "ngrams");
  auto df = array_of<std::size_t>(r.raw("df"), r, "df");
  r.finish();
  try {
    return TfidfModel(config, NgramVocabulary(std::move(ngrams), std::move(df), n));
  } catch (const Error& e) {
    throw Error(ErrorCode::parse, "invalid TF-IDF model: " + std::string(e.what()));
  }
}

namespace {

json parameters_of(const NaiveBayesModel& m) {
  return {{"alpha", m.alpha},
          {"log_prior", m.log_prior},
          {"log_likelihood", json::array({m.log_likelihood[0], m.log_likelihood[1]})}};
}

json parameters_of(const SgdLinearModel& m) {
  json config = to_json(m.config);
  config["seed"] = m.config.seed;
  return {{"config", std::move(config)}, {"theta", m.theta}};
}

json parameters_of(const GbdtModel& m) {
  json trees = json::array();
  for (const auto& t : m.trees) {
    json nodes = json::array();
    for (const auto& n : t.nodes) {
      nodes.push_back(json::array({n.left, n.right, n.feature, n.bin, n.threshold, n.value}));
    }
    trees.push_back(std::move(nodes));
  }
  return {{"config", to_json(m.config)},
          {"base_score", m.base_score},
          {"n_features", m.n_features},
          {"trees", std::move(trees)}};
}

NaiveBayesModel nb_from(Reader& r) {
  NaiveBayesModel m;
  m.alpha = r.number("alpha");
  auto prior = array_of<double>(r.raw("log_prior"), r, "log_prior");
  auto ll = array_of<std::vector<double>>(r.raw("log_likelihood"), r, "log_likelihood");
  r.finish();
  if (prior.size() != 2) r.fail("log_prior", "must hold two values");
  if (ll.size() != 2 || ll[0].size() != ll[1].size()) {
    r.fail("log_likelihood", "must hold two equally long rows");
  }
  m.log_prior = {prior[0], prior[1]};
  m.log_likelihood = {std::move(ll[0]), std::move(ll[1])};
  return m;
}

SgdLinearModel sgd_from(Reader& r) {
  SgdLinearModel m;
  Reader cr = r.object("config");
  m.config.seed = cr.unsigned_integer("seed");
  read_into(cr, m.config);
  m.theta = array_of<double>(r.raw("theta"), r, "theta");
  r.finish();
  if (m.theta.empty()) r.fail("theta", "must hold at least the bias");
  return m;
}

GbdtModel gbdt_from(Reader& r) {
  GbdtModel m;
  Reader cr = r.object("config");
  read_into(cr, m.config);
  m.base_score = r.number("base_score");
  m.n_features = static_cast<std::size_t>(r.unsigned_integer("n_features"));
  const json& trees = r.raw("trees");
  r.finish();
  if (!trees.is_array()) r.fail("trees", "must be an array");
  for (const auto& t : trees) {
    if (!t.is_array() || t.empty()) r.fail("trees", "must hold non-empty node arrays");
    DecisionTree tree;
    for (const auto& n : t) {
      if (!n.is_array() || n.size() != 6) r.fail("trees", "nodes must be 6-element arrays");
      TreeNode node;
      try {
        node.left = n[0].get<std::int32_t>();
        node.right = n[1].get<std::int32_t>();
        node.feature = n[2].get<Column>();
        node.bin = n[3].get<std::uint32_t>();
        node.threshold = n[4].get<double>();
        node.value = n[5].get<double>();
      } catch (const json::exception&) {
        r.fail("trees", "has a node field of the wrong type");
      }
      tree.nodes.push_back(node);
    }
    // Children must point forward so prediction always terminates.
    const auto size = static_cast<std::int32_t>(tree.nodes.size());
    for (std::int32_t k = 0; k < size; ++k) {
      const TreeNode& n = tree.nodes[static_cast<std::size_t>(k)];
      if (n.is_leaf()) {
        if (n.right != -1) r.fail("trees", "leaf with a right child");
        continue;
      }
      if (n.left <= k || n.right <= k || n.left >= size || n.right >= size ||
          n.feature >= m.n_features) {
        r.fail("trees", "node " + std::to_string(k) + " is out of range");
      }
    }
    m.trees.push_back(std::move(tree));
  }
  return m;
}

}  // namespace

json model_parameters(const TrainedClassifier& model) {
  return std::visit([](const auto& m) { return parameters_of(m); }, model);
}

TrainedClassifier model_from_parameters(ModelKind kind, const json& parameters) {
  Reader r(parameters, "parameters", ErrorCode::parse);
  switch (kind) {
    case ModelKind::naive_bayes:
      return nb_from(r);
    case ModelKind::sgd_linear:
      return sgd_from(r);
    case ModelKind::gbdt:
      return gbdt_from(r);
  }
  throw Error(ErrorCode::version, "unknown model kind");
}

}  // namespace authentext::detail
