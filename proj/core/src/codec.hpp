#pragma once

// JSON conversions shared by the model, bundle and config readers.

#include <cstdint>
#include <set>
#include <string>

#include <json.hpp>

#include "authentext/classifier.hpp"
#include "authentext/config.hpp"
#include "authentext/error.hpp"
#include "authentext/features.hpp"

namespace authentext::detail {

using json = nlohmann::json;

/// Typed access to one JSON object that remembers which keys were read, so
/// that finish() can reject the rest.
class Reader {
 public:
  Reader(const json& object, std::string path, ErrorCode code);

  bool has(const std::string& key) const { return object_.contains(key); }
  const json& raw(const std::string& key);

  void read(const std::string& key, double& out);
  void read(const std::string& key, std::size_t& out);
  void read(const std::string& key, bool& out);
  void read(const std::string& key, std::string& out);

  double number(const std::string& key);
  std::uint64_t unsigned_integer(const std::string& key);
  std::string string(const std::string& key);
  Reader object(const std::string& key);

  [[noreturn]] void fail(const std::string& key, const std::string& what) const;
  void finish() const;

  std::string key_path(const std::string& key) const;

 private:
  const json& require(const std::string& key);

  const json& object_;
  std::string path_;
  ErrorCode code_;
  std::set<std::string> seen_;
};

json parse_json(std::string_view bytes, std::string_view what);
void check_format_version(const json& doc, int expected, std::string_view what);

json to_json(const TfidfConfig& c);
json to_json(const SgdConfig& c);  // without the seed
json to_json(const GbdtConfig& c);
void read_into(Reader& r, TfidfConfig& c);
void read_into(Reader& r, SgdConfig& c);
void read_into(Reader& r, GbdtConfig& c);

json tfidf_to_json(const TfidfModel& model);
TfidfModel tfidf_from_json(const json& doc, const std::string& path);

json model_parameters(const TrainedClassifier& model);
TrainedClassifier model_from_parameters(ModelKind kind, const json& parameters);

/// dump(1) plus a trailing newline; the canonical artifact encoding.
std::string canonical(const json& doc);

}  // namespace authentext::detail
