#include "authentext/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_set>

#include "authentext/csv.hpp"
#include "authentext/error.hpp"
#include "authentext/io.hpp"
#include "authentext/rng.hpp"
#include "authentext/utf8.hpp"

namespace authentext {

namespace {

using json = nlohmann::json;

std::string at_line(std::size_t line) { return " at line " + std::to_string(line); }

std::size_t line_of_offset(std::string_view data, std::size_t offset) {
  return 1 + static_cast<std::size_t>(
                 std::count(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

void require_utf8(std::string_view data) {
  if (auto bad = utf8::find_invalid(data)) {
    throw Error(ErrorCode::parse, "undecodable UTF-8 bytes" + at_line(line_of_offset(data, *bad)));
  }
}

Label parse_label_field(std::string_view field, std::size_t line) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::parse, "malformed label '" + std::string(field) + "'" + at_line(line));
  }
  if (value != 0 && value != 1) {
    throw Error(ErrorCode::input, "label out of range" + at_line(line));
  }
  return static_cast<Label>(value);
}

struct ParsedRows {
  std::vector<Document> documents;
  std::vector<std::optional<Label>> labels;
  std::vector<std::size_t> lines;
};

ParsedRows parse_csv_rows(std::string_view data, bool labels_required) {
  ParsedRows rows;
  auto records = csv::parse(data);
  if (records.empty()) {
    throw Error(ErrorCode::parse, "missing CSV header (expected id,text,label)");
  }
  const auto& header = records.front().fields;
  const bool has_label = header.size() == 3 && header[0] == "id" && header[1] == "text" &&
                         header[2] == "label";
  const bool unlabeled = header.size() == 2 && header[0] == "id" && header[1] == "text";
  if (!has_label && !(unlabeled && !labels_required)) {
    throw Error(ErrorCode::parse, "bad CSV header at line 1 (expected id,text,label)");
  }
  const std::size_t width = header.size();
  for (std::size_t r = 1; r < records.size(); ++r) {
    auto& rec = records[r];
    if (rec.fields.size() != width) {
      throw Error(ErrorCode::parse, "expected " + std::to_string(width) + " fields, found " +
                                        std::to_string(rec.fields.size()) + at_line(rec.line));
    }
    rows.lines.push_back(rec.line);
    rows.labels.push_back(has_label ? std::optional<Label>(parse_label_field(rec.fields[2], rec.line))
                                    : std::nullopt);
    rows.documents.push_back({std::move(rec.fields[0]), std::move(rec.fields[1])});
  }
  return rows;
}

ParsedRows parse_jsonl_rows(std::string_view data, bool labels_required) {
  ParsedRows rows;
  std::size_t line = 0;
  std::size_t pos = 0;
  while (pos < data.size()) {
    std::size_t end = data.find('\n', pos);
    if (end == std::string_view::npos) end = data.size();
    std::string_view text = data.substr(pos, end - pos);
    pos = end + 1;
    ++line;
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    if (text.find_first_not_of(" \t") == std::string_view::npos) continue;

    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::parse, "malformed JSON" + at_line(line));
    }
    if (!obj.is_object()) throw Error(ErrorCode::parse, "expected a JSON object" + at_line(line));
    for (const auto& [key, value] : obj.items()) {
      if (key != "id" && key != "text" && key != "label") {
        throw Error(ErrorCode::parse, "unknown key '" + key + "'" + at_line(line));
      }
    }
    if (!obj.contains("id") || !obj["id"].is_string()) {
      throw Error(ErrorCode::parse, "missing or non-string 'id'" + at_line(line));
    }
    if (!obj.contains("text") || !obj["text"].is_string()) {
      throw Error(ErrorCode::parse, "missing or non-string 'text'" + at_line(line));
    }
    std::optional<Label> label;
    if (obj.contains("label")) {
      const auto& l = obj["label"];
      if (!l.is_number_integer()) {
        throw Error(ErrorCode::parse, "non-integer 'label'" + at_line(line));
      }
      const auto v = l.get<long long>();
      if (v != 0 && v != 1) throw Error(ErrorCode::input, "label out of range" + at_line(line));
      label = static_cast<Label>(v);
    } else if (labels_required) {
      throw Error(ErrorCode::parse, "missing 'label'" + at_line(line));
    }
    rows.lines.push_back(line);
    rows.labels.push_back(label);
    rows.documents.push_back({obj["id"].get<std::string>(), obj["text"].get<std::string>()});
  }
  return rows;
}

ParsedRows parse_rows(std::string_view data, CorpusFormat format, bool labels_required) {
  require_utf8(data);
  ParsedRows rows = format == CorpusFormat::csv ? parse_csv_rows(data, labels_required)
                                                : parse_jsonl_rows(data, labels_required);
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < rows.documents.size(); ++i) {
    const auto& id = rows.documents[i].id;
    if (id.empty()) throw Error(ErrorCode::input, "empty id" + at_line(rows.lines[i]));
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::input, "duplicate id '" + id + "'" + at_line(rows.lines[i]));
    }
  }
  return rows;
}

}  // namespace

LabeledCorpus::LabeledCorpus(std::vector<Document> documents, std::vector<Label> labels)
    : documents_(std::move(documents)), labels_(std::move(labels)) {
  if (documents_.size() != labels_.size()) {
    throw Error(ErrorCode::input, "corpus has " + std::to_string(documents_.size()) +
                                      " documents but " + std::to_string(labels_.size()) +
                                      " labels");
  }
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    if (labels_[i] > 1) throw Error(ErrorCode::input, "label out of range at index " + std::to_string(i));
    if (documents_[i].id.empty()) throw Error(ErrorCode::input, "empty id at index " + std::to_string(i));
    if (!seen.insert(documents_[i].id).second) {
      throw Error(ErrorCode::input, "duplicate id '" + documents_[i].id + "'");
    }
  }
}

std::size_t LabeledCorpus::count(Label label) const noexcept {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

std::vector<std::string> LabeledCorpus::texts() const {
  std::vector<std::string> out;
  out.reserve(documents_.size());
  for (const auto& d : documents_) out.push_back(d.text);
  return out;
}

CorpusFormat corpus_format_from_name(std::string_view name) {
  if (name == "csv") return CorpusFormat::csv;
  if (name == "jsonl") return CorpusFormat::jsonl;
  throw Error(ErrorCode::usage, "unknown corpus format '" + std::string(name) +
                                    "' (expected csv or jsonl)");
}

std::optional<CorpusFormat> corpus_format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return CorpusFormat::csv;
  if (ext == ".jsonl" || ext == ".json") return CorpusFormat::jsonl;
  return std::nullopt;
}

LabeledCorpus parse_corpus(std::string_view data, CorpusFormat format) {
  ParsedRows rows = parse_rows(data, format, /*labels_required=*/true);
  std::vector<Label> labels;
  labels.reserve(rows.labels.size());
  for (const auto& l : rows.labels) labels.push_back(*l);
  return LabeledCorpus(std::move(rows.documents), std::move(labels));
}

LabeledCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  const std::string data = read_file(path);
  try {
    return parse_corpus(data, format);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<Document> parse_documents(std::string_view data, CorpusFormat format) {
  return parse_rows(data, format, /*labels_required=*/false).documents;
}

std::vector<Document> load_documents(const std::filesystem::path& path, CorpusFormat format) {
  const std::string data = read_file(path);
  try {
    return parse_documents(data, format);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string serialize_corpus(const LabeledCorpus& corpus, CorpusFormat format) {
  std::string out;
  if (format == CorpusFormat::csv) {
    out = "id,text,label\n";
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto& d = corpus.document(i);
      out += csv::escape(d.id);
      out += ',';
      out += csv::escape(d.text);
      out += ',';
      out += static_cast<char>('0' + corpus.label(i));
      out += '\n';
    }
  } else {
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto& d = corpus.document(i);
      json row = {{"id", d.id}, {"text", d.text}, {"label", static_cast<int>(corpus.label(i))}};
      out += row.dump();
      out += '\n';
    }
  }
  return out;
}

void save_corpus(const LabeledCorpus& corpus, const std::filesystem::path& path,
                 CorpusFormat format) {
  write_file(path, serialize_corpus(corpus, format));
}

CorpusSplit split_corpus(const LabeledCorpus& corpus, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw Error(ErrorCode::input, "test_fraction must lie in (0, 1)");
  }
  if (corpus.size() < 2) {
    throw Error(ErrorCode::input, "corpus too small to split (need at least 2 documents)");
  }
  Rng rng(spec.seed, "split");
  std::vector<bool> in_test(corpus.size(), false);
  for (Label cls : {Label{0}, Label{1}}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (corpus.label(i) == cls) members.push_back(i);
    }
    const std::size_t n = members.size();
    if (n == 0) continue;
    auto k = static_cast<std::size_t>(std::llround(spec.test_fraction * static_cast<double>(n)));
    if (n >= 2) {
      k = std::clamp<std::size_t>(k, 1, n - 1);
    } else {
      k = 0;
    }
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t j = 0; j < k; ++j) in_test[members[j]] = true;
  }

  std::vector<Document> train_docs, test_docs;
  std::vector<Label> train_labels, test_labels;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (in_test[i]) {
      test_docs.push_back(corpus.document(i));
      test_labels.push_back(corpus.label(i));
    } else {
      train_docs.push_back(corpus.document(i));
      train_labels.push_back(corpus.label(i));
    }
  }
  if (train_docs.empty() || test_docs.empty()) {
    throw Error(ErrorCode::input, "corpus too small to place a document in both train and test");
  }
  return {LabeledCorpus(std::move(train_docs), std::move(train_labels)),
          LabeledCorpus(std::move(test_docs), std::move(test_labels))};
}

const std::vector<std::string>& synth_lexicon() {
  static const std::vector<std::string> lexicon = [] {
    constexpr std::string_view consonants = "bcdfghjklmnprstvwxyz";
    constexpr std::string_view vowels = "aeiou";
    std::vector<std::string> syllables;
    for (char c : consonants) {
      for (char v : vowels) syllables.push_back(std::string{c, v});
    }
    // The first two syllables encode the index uniquely; every third word
    // gets a third syllable for length variety.
    std::vector<std::string> words;
    words.reserve(kSynthLexiconSize);
    for (std::size_t i = 0; i < kSynthLexiconSize; ++i) {
      std::string w = syllables[i % 100] + syllables[(i / 100) * 5 + 2];
      if (i % 3 == 0) w += syllables[(i * 37) % 100];
      words.push_back(std::move(w));
    }
    return words;
  }();
  return lexicon;
}

std::vector<std::size_t> synth_ai_ranking(double divergence) {
  constexpr std::size_t n = kSynthLexiconSize;
  std::vector<double> key(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double target = static_cast<double>((r + n / 2) % n);
    key[r] = (1.0 - divergence) * static_cast<double>(r) + divergence * target;
  }
  std::vector<std::size_t> ranking(n);
  for (std::size_t r = 0; r < n; ++r) ranking[r] = r;
  std::stable_sort(ranking.begin(), ranking.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  return ranking;
}

LabeledCorpus synth_corpus(std::size_t n_per_class, std::uint64_t seed, double divergence) {
  if (n_per_class < 1) throw Error(ErrorCode::input, "n_per_class must be at least 1");
  if (!(divergence >= 0.0 && divergence <= 1.0)) {
    throw Error(ErrorCode::input, "divergence must lie in [0, 1]");
  }
  const auto& lexicon = synth_lexicon();
  constexpr std::size_t n = kSynthLexiconSize;

  // Zipf(1) cumulative weights over ranks.
  std::vector<double> cdf(n);
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    total += 1.0 / static_cast<double>(r + 1);
    cdf[r] = total;
  }
  const std::vector<std::size_t> ai_ranking = synth_ai_ranking(divergence);

  Rng rng(seed, "synth");
  auto sample_rank = [&] {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), n - 1);
  };

  std::vector<Document> docs;
  std::vector<Label> labels;
  docs.reserve(2 * n_per_class);
  labels.reserve(2 * n_per_class);
  std::size_t next_id = 0;
  for (std::size_t k = 0; k < n_per_class; ++k) {
    for (Label cls : {Label{0}, Label{1}}) {
      const std::size_t length =
          kSynthMinLength + static_cast<std::size_t>(rng.below(kSynthMaxLength - kSynthMinLength + 1));
      std::string text;
      for (std::size_t w = 0; w < length; ++w) {
        const std::size_t rank = sample_rank();
        const std::size_t word = cls == 0 ? rank : ai_ranking[rank];
        if (w > 0) text.push_back(' ');
        text += lexicon[word];
      }
      std::string id = std::to_string(next_id++);
      id.insert(0, 6 - std::min<std::size_t>(6, id.size()), '0');
      docs.push_back({"synth-" + id, std::move(text)});
      labels.push_back(cls);
    }
  }
  return LabeledCorpus(std::move(docs), std::move(labels));
}

}  // namespace authentext
