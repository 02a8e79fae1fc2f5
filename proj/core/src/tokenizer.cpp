#include "authentext/tokenizer.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <set>

#include "authentext/error.hpp"
#include "authentext/parallel.hpp"
#include "authentext/utf8.hpp"

namespace authentext {

namespace {

using json = nlohmann::json;

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::input, "vocabulary field '" + field + "': " + what);
}

bool is_reserved(char32_t cp) noexcept { return cp == U'\uE000' || cp == U'\uE001'; }

// Decoded text split into words; rejects the reserved code points.
std::vector<std::u32string> training_words(std::span<const std::string> texts) {
  std::vector<std::u32string> words;
  for (std::size_t t = 0; t < texts.size(); ++t) {
    const std::u32string decoded = utf8::decode(texts[t]);
    for (auto w : utf8::split_words(decoded)) {
      if (std::any_of(w.begin(), w.end(), is_reserved)) {
        throw Error(ErrorCode::input, "text " + std::to_string(t) +
                                          " contains a reserved private-use code point "
                                          "(U+E000 or U+E001)");
      }
      words.emplace_back(w);
    }
  }
  return words;
}

std::vector<std::string> initial_symbols(const std::vector<std::u32string>& words) {
  std::set<std::string> chars;
  for (const auto& w : words) {
    for (char32_t cp : w) chars.insert(utf8::encode(cp));
  }
  std::vector<std::string> symbols;
  symbols.reserve(chars.size() + 2);
  symbols.emplace_back(kUnknownSymbol);
  symbols.emplace_back(kEndOfWordMarker);
  symbols.insert(symbols.end(), chars.begin(), chars.end());
  return symbols;
}

// Incremental pair statistics for BPE training. Counts are kept per pair of
// symbol ids; the ordered set yields the next merge under the tie rule.
class PairStats {
 public:
  explicit PairStats(const std::vector<std::string>& symbols)
      : order_(PairOrder{&symbols}) {}

  void add(TokenId l, TokenId r, std::int64_t delta) {
    if (delta == 0) return;
    const std::uint64_t key = pair_key(l, r);
    std::int64_t& count = counts_[key];
    if (count > 0) order_.erase(Entry{count, l, r});
    count += delta;
    if (count > 0) {
      order_.insert(Entry{count, l, r});
    } else {
      counts_.erase(key);
    }
  }

  struct Entry {
    std::int64_t count;
    TokenId left;
    TokenId right;
  };

  const Entry* best() const { return order_.empty() ? nullptr : &*order_.begin(); }

  static std::uint64_t pair_key(TokenId l, TokenId r) noexcept {
    return (static_cast<std::uint64_t>(l) << 32) | r;
  }

 private:
  struct PairOrder {
    const std::vector<std::string>* symbols;
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.count != b.count) return a.count > b.count;
      const auto& s = *symbols;
      if (a.left != b.left) {
        if (int c = s[a.left].compare(s[b.left]); c != 0) return c < 0;
      }
      if (a.right != b.right) {
        if (int c = s[a.right].compare(s[b.right]); c != 0) return c < 0;
      }
      // Distinct ids never share a symbol string, so this only orders equal entries.
      return std::tie(a.left, a.right) < std::tie(b.left, b.right);
    }
  };

  std::unordered_map<std::uint64_t, std::int64_t> counts_;
  std::set<Entry, PairOrder> order_;
};

// Merges every occurrence of (l, r) left to right. Returns whether any did.
bool apply_merge(std::vector<TokenId>& word, TokenId l, TokenId r, TokenId merged) {
  bool changed = false;
  std::size_t out = 0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i + 1 < word.size() && word[i] == l && word[i + 1] == r) {
      word[out++] = merged;
      ++i;
      changed = true;
    } else {
      word[out++] = word[i];
    }
  }
  word.resize(out);
  return changed;
}

}  // namespace

BpeVocab::BpeVocab(std::vector<std::string> symbols,
                   std::vector<std::pair<std::string, std::string>> merges,
                   std::string end_of_word_marker, TokenId unknown_id)
    : symbols_(std::move(symbols)), marker_(std::move(end_of_word_marker)), unknown_id_(unknown_id) {
  if (marker_.empty()) field_error("end_of_word_marker", "must be non-empty");
  ids_.reserve(symbols_.size());
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i].empty()) field_error("symbols[" + std::to_string(i) + "]", "empty symbol");
    if (!utf8::is_valid(symbols_[i])) {
      field_error("symbols[" + std::to_string(i) + "]", "invalid UTF-8");
    }
    if (!ids_.emplace(symbols_[i], static_cast<TokenId>(i)).second) {
      field_error("symbols[" + std::to_string(i) + "]", "duplicate symbol");
    }
  }
  if (unknown_id_ >= symbols_.size()) field_error("unknown_id", "outside the symbol table");
  auto marker_it = ids_.find(marker_);
  if (marker_it == ids_.end()) field_error("end_of_word_marker", "not in the symbol table");
  marker_id_ = marker_it->second;
  if (marker_id_ == unknown_id_) field_error("end_of_word_marker", "collides with unknown_id");

  merges_.reserve(merges.size());
  for (std::size_t rank = 0; rank < merges.size(); ++rank) {
    auto& [left, right] = merges[rank];
    const std::string field = "merges[" + std::to_string(rank) + "]";
    auto l = ids_.find(left);
    auto r = ids_.find(right);
    if (l == ids_.end()) field_error(field, "left symbol not in the symbol table");
    if (r == ids_.end()) field_error(field, "right symbol not in the symbol table");
    std::string merged = left + right;
    auto m = ids_.find(merged);
    if (m == ids_.end()) field_error(field, "merged symbol not in the symbol table");
    // A pair that appears twice can never fire the second time.
    if (!merge_index_.emplace(pair_key(l->second, r->second), MergeTarget{rank, m->second}).second) {
      field_error(field, "duplicate merge rule");
    }
    merges_.push_back(MergeRule{std::move(left), std::move(right), std::move(merged), rank});
  }
}

std::optional<TokenId> BpeVocab::find(std::string_view symbol) const {
  auto it = ids_.find(std::string(symbol));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::vector<TokenId> BpeVocab::encode_word(std::u32string_view word) const {
  std::vector<TokenId> ids;
  ids.reserve(word.size() + 1);
  std::string buf;
  for (char32_t cp : word) {
    if (is_reserved(cp)) {
      ids.push_back(unknown_id_);
      continue;
    }
    buf.clear();
    utf8::append(buf, cp);
    auto it = ids_.find(buf);
    ids.push_back(it == ids_.end() ? unknown_id_ : it->second);
  }
  ids.push_back(marker_id_);

  // Replays training: rules fire in ascending rank; a rule whose pair only
  // appears after a later rule fired stays skipped, exactly as in training.
  std::size_t floor = 0;  // smallest rank still eligible
  while (ids.size() > 1) {
    const MergeTarget* best = nullptr;
    std::size_t best_pos = 0;
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
      if (ids[i] == unknown_id_ || ids[i + 1] == unknown_id_) continue;
      auto it = merge_index_.find(pair_key(ids[i], ids[i + 1]));
      if (it == merge_index_.end() || it->second.rank < floor) continue;
      if (!best || it->second.rank < best->rank) {
        best = &it->second;
        best_pos = i;
      }
    }
    if (!best) break;
    apply_merge(ids, ids[best_pos], ids[best_pos + 1], best->merged);
    floor = best->rank + 1;
  }
  return ids;
}

std::size_t initial_symbol_count(std::span<const std::string> texts) {
  return initial_symbols(training_words(texts)).size();
}

BpeVocab train_bpe(std::span<const std::string> texts, const BpeTrainOptions& options) {
  if (texts.empty()) throw Error(ErrorCode::training, "cannot train BPE on an empty corpus");
  const std::vector<std::u32string> raw_words = training_words(texts);

  std::vector<std::string> symbols = initial_symbols(raw_words);
  if (options.vocab_size < symbols.size()) {
    throw Error(ErrorCode::training, "vocab_size " + std::to_string(options.vocab_size) +
                                         " is smaller than the " + std::to_string(symbols.size()) +
                                         " initial symbols");
  }
  std::unordered_map<std::string, TokenId> ids;
  for (std::size_t i = 0; i < symbols.size(); ++i) ids.emplace(symbols[i], static_cast<TokenId>(i));
  const TokenId marker_id = 1;

  // Distinct words with multiplicities, in first-seen order.
  std::vector<std::vector<TokenId>> words;
  std::vector<std::int64_t> word_counts;
  {
    std::unordered_map<std::u32string, std::size_t> index;
    for (const auto& w : raw_words) {
      auto [it, inserted] = index.emplace(w, words.size());
      if (inserted) {
        std::vector<TokenId> seq;
        seq.reserve(w.size() + 1);
        for (char32_t cp : w) seq.push_back(ids.at(utf8::encode(cp)));
        seq.push_back(marker_id);
        words.push_back(std::move(seq));
        word_counts.push_back(1);
      } else {
        ++word_counts[it->second];
      }
    }
  }

  PairStats stats(symbols);
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> where;
  for (std::uint32_t w = 0; w < words.size(); ++w) {
    const auto& seq = words[w];
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      stats.add(seq[i], seq[i + 1], word_counts[w]);
      auto& list = where[PairStats::pair_key(seq[i], seq[i + 1])];
      if (list.empty() || list.back() != w) list.push_back(w);
    }
  }

  std::vector<std::pair<std::string, std::string>> merges;
  std::vector<std::uint32_t> stamp(words.size(), 0);
  std::uint32_t generation = 0;
  std::unordered_map<std::uint64_t, std::int64_t> delta;

  while (symbols.size() < options.vocab_size &&
         (options.max_merges == 0 || merges.size() < options.max_merges)) {
    const auto* best = stats.best();
    if (!best || best->count < 2) break;
    const TokenId left = best->left;
    const TokenId right = best->right;

    std::string merged = symbols[left] + symbols[right];
    TokenId merged_id;
    if (auto it = ids.find(merged); it != ids.end()) {
      merged_id = it->second;
    } else {
      merged_id = static_cast<TokenId>(symbols.size());
      ids.emplace(merged, merged_id);
      symbols.push_back(merged);
    }
    merges.emplace_back(symbols[left], symbols[right]);

    ++generation;
    delta.clear();
    const std::vector<std::uint32_t> affected = std::move(where[PairStats::pair_key(left, right)]);
    where.erase(PairStats::pair_key(left, right));
    for (std::uint32_t w : affected) {
      if (stamp[w] == generation) continue;
      stamp[w] = generation;
      auto& seq = words[w];
      const std::int64_t c = word_counts[w];
      std::vector<TokenId> before = seq;
      if (!apply_merge(seq, left, right, merged_id)) continue;
      for (std::size_t i = 0; i + 1 < before.size(); ++i) {
        delta[PairStats::pair_key(before[i], before[i + 1])] -= c;
      }
      for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        const std::uint64_t key = PairStats::pair_key(seq[i], seq[i + 1]);
        delta[key] += c;
        if (seq[i] == merged_id || seq[i + 1] == merged_id) {
          auto& list = where[key];
          if (list.empty() || list.back() != w) list.push_back(w);
        }
      }
    }
    // Apply in key order so the result does not depend on hash iteration.
    std::vector<std::pair<std::uint64_t, std::int64_t>> ordered(delta.begin(), delta.end());
    std::sort(ordered.begin(), ordered.end());
    for (const auto& [key, d] : ordered) {
      stats.add(static_cast<TokenId>(key >> 32), static_cast<TokenId>(key & 0xFFFFFFFFu), d);
    }
  }

  return BpeVocab(std::move(symbols), std::move(merges), std::string(kEndOfWordMarker), 0);
}

TokenSequence encode(const BpeVocab& vocab, std::string_view text) {
  TokenSequence seq;
  const std::u32string decoded = utf8::decode(text);
  for (auto word : utf8::split_words(decoded)) {
    auto ids = vocab.encode_word(word);
    seq.ids.insert(seq.ids.end(), ids.begin(), ids.end());
  }
  return seq;
}

std::string decode(const BpeVocab& vocab, const TokenSequence& seq) {
  std::string joined;
  for (TokenId id : seq.ids) {
    if (id == vocab.unknown_id()) {
      throw Error(ErrorCode::input, "cannot decode a sequence containing the unknown id");
    }
    if (id >= vocab.size()) {
      throw Error(ErrorCode::input, "token id " + std::to_string(id) + " outside the vocabulary");
    }
    joined += vocab.symbol(id);
  }
  const std::string& marker = vocab.end_of_word_marker();
  std::string out;
  out.reserve(joined.size());
  for (std::size_t i = 0; i < joined.size();) {
    if (joined.compare(i, marker.size(), marker) == 0) {
      out.push_back(' ');
      i += marker.size();
    } else {
      out.push_back(joined[i++]);
    }
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::string save_vocab(const BpeVocab& vocab) {
  json merges = json::array();
  for (const auto& m : vocab.merges()) merges.push_back(json::array({m.left, m.right}));
  json doc = {
      {"format_version", kVocabFormatVersion},
      {"end_of_word_marker", vocab.end_of_word_marker()},
      {"unknown_id", vocab.unknown_id()},
      {"merges", std::move(merges)},
      {"symbols", std::vector<std::string>(vocab.symbols().begin(), vocab.symbols().end())},
  };
  return doc.dump(1) + "\n";
}

namespace {

json parse_document(std::string_view bytes, std::string_view what) {
  try {
    return json::parse(bytes);
  } catch (const json::parse_error&) {
    throw Error(ErrorCode::parse, "truncated or malformed " + std::string(what) + " document");
  }
}

void check_version(const json& doc) {
  if (!doc.is_object()) field_error("<root>", "expected a JSON object");
  if (!doc.contains("format_version") || !doc["format_version"].is_number_integer()) {
    field_error("format_version", "missing or not an integer");
  }
  const auto v = doc["format_version"].get<long long>();
  if (v != kVocabFormatVersion) {
    throw Error(ErrorCode::version, "vocabulary format_version " + std::to_string(v) +
                                        " is not supported (expected " +
                                        std::to_string(kVocabFormatVersion) + ")");
  }
}

std::vector<std::string> string_array(const json& doc, const std::string& field) {
  if (!doc.contains(field) || !doc[field].is_array()) field_error(field, "missing or not an array");
  std::vector<std::string> out;
  out.reserve(doc[field].size());
  for (std::size_t i = 0; i < doc[field].size(); ++i) {
    const auto& v = doc[field][i];
    if (!v.is_string()) field_error(field + "[" + std::to_string(i) + "]", "not a string");
    out.push_back(v.get<std::string>());
  }
  return out;
}

TokenId unknown_id_field(const json& doc) {
  if (!doc.contains("unknown_id") || !doc["unknown_id"].is_number_unsigned()) {
    field_error("unknown_id", "missing or not a non-negative integer");
  }
  return doc["unknown_id"].get<TokenId>();
}

BpeVocab bpe_from_json(const json& doc) {
  if (!doc.contains("end_of_word_marker") || !doc["end_of_word_marker"].is_string()) {
    field_error("end_of_word_marker", "missing or not a string");
  }
  if (!doc.contains("merges") || !doc["merges"].is_array()) {
    field_error("merges", "missing or not an array");
  }
  std::vector<std::pair<std::string, std::string>> merges;
  const auto& arr = doc["merges"];
  merges.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& m = arr[i];
    if (!m.is_array() || m.size() != 2 || !m[0].is_string() || !m[1].is_string()) {
      field_error("merges[" + std::to_string(i) + "]", "expected [left, right] strings");
    }
    merges.emplace_back(m[0].get<std::string>(), m[1].get<std::string>());
  }
  return BpeVocab(string_array(doc, "symbols"), std::move(merges),
                  doc["end_of_word_marker"].get<std::string>(), unknown_id_field(doc));
}

}  // namespace

BpeVocab load_vocab(std::string_view bytes) {
  const json doc = parse_document(bytes, "vocabulary");
  check_version(doc);
  if (doc.contains("unit") && doc["unit"] != "bpe") {
    throw Error(ErrorCode::version, "vocabulary is not a BPE vocabulary");
  }
  return bpe_from_json(doc);
}

std::string_view token_unit_name(TokenUnit unit) noexcept {
  return unit == TokenUnit::bpe ? "bpe" : "word";
}

TokenUnit token_unit_from_name(std::string_view name) {
  if (name == "bpe") return TokenUnit::bpe;
  if (name == "word") return TokenUnit::word;
  throw Error(ErrorCode::usage, "unknown token unit '" + std::string(name) + "' (expected bpe or word)");
}

std::size_t Tokenizer::size() const noexcept {
  return std::visit([](const auto& v) { return v.size(); }, vocab_);
}

TokenSequence Tokenizer::encode(std::string_view text) const {
  return std::visit([&](const auto& v) { return authentext::encode(v, text); }, vocab_);
}

std::vector<TokenSequence> Tokenizer::encode_all(std::span<const std::string> texts,
                                                 unsigned threads) const {
  std::vector<TokenSequence> out(texts.size());
  if (const auto* words = this->words()) {
    parallel_blocks(texts.size(), threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) out[i] = authentext::encode(*words, texts[i]);
    });
    return out;
  }
  const BpeVocab& vocab = *bpe();
  parallel_blocks(texts.size(), threads, [&](std::size_t b, std::size_t e) {
    std::unordered_map<std::u32string, std::vector<TokenId>> cache;
    for (std::size_t i = b; i < e; ++i) {
      const std::u32string decoded = utf8::decode(texts[i]);
      auto& ids = out[i].ids;
      for (auto word : utf8::split_words(decoded)) {
        auto [it, inserted] = cache.try_emplace(std::u32string(word));
        if (inserted) it->second = vocab.encode_word(word);
        ids.insert(ids.end(), it->second.begin(), it->second.end());
      }
    }
  });
  return out;
}

std::string Tokenizer::serialize() const {
  return std::visit([](const auto& v) { return save_vocab(v); }, vocab_);
}

Tokenizer Tokenizer::parse(std::string_view bytes) {
  const json doc = parse_document(bytes, "vocabulary");
  check_version(doc);
  if (doc.contains("unit")) {
    if (!doc["unit"].is_string()) field_error("unit", "not a string");
    const auto unit = token_unit_from_name(doc["unit"].get<std::string>());
    if (unit == TokenUnit::word) {
      auto words = string_array(doc, "words");
      if (unknown_id_field(doc) != 0) field_error("unknown_id", "word vocabularies reserve id 0");
      return Tokenizer(WordVocab(std::move(words)));
    }
  }
  return Tokenizer(bpe_from_json(doc));
}

}  // namespace authentext
