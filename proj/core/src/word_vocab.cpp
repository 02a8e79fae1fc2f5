#include <json.hpp>

#include <algorithm>

#include "authentext/error.hpp"
#include "authentext/tokenizer.hpp"
#include "authentext/utf8.hpp"

namespace authentext {

WordVocab::WordVocab(std::vector<std::string> words) : words_(std::move(words)) {
  if (words_.empty() || words_.front() != kUnknownSymbol) {
    throw Error(ErrorCode::input, "vocabulary field 'words[0]': must be the unknown symbol");
  }
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!ids_.emplace(words_[i], static_cast<TokenId>(i)).second) {
      throw Error(ErrorCode::input,
                  "vocabulary field 'words[" + std::to_string(i) + "]': duplicate word");
    }
  }
}

std::optional<TokenId> WordVocab::find(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

WordVocab train_word_vocab(std::span<const std::string> texts, std::size_t vocab_size) {
  if (texts.empty()) throw Error(ErrorCode::training, "cannot build a word vocabulary from no texts");
  if (vocab_size < 1) throw Error(ErrorCode::training, "vocab_size must be at least 1");
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& text : texts) {
    const std::u32string decoded = utf8::decode(text);
    for (auto w : utf8::split_words(decoded)) ++counts[utf8::encode(w)];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto& [w, c] : counts) {
    if (c >= 2 && w != kUnknownSymbol) ranked.emplace_back(w, c);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> words{std::string(kUnknownSymbol)};
  for (auto& [w, c] : ranked) {
    if (words.size() >= vocab_size) break;
    words.push_back(std::move(w));
  }
  return WordVocab(std::move(words));
}

TokenSequence encode(const WordVocab& vocab, std::string_view text) {
  TokenSequence seq;
  const std::u32string decoded = utf8::decode(text);
  for (auto w : utf8::split_words(decoded)) {
    seq.ids.push_back(vocab.find(utf8::encode(w)).value_or(vocab.unknown_id()));
  }
  return seq;
}

std::string decode(const WordVocab& vocab, const TokenSequence& seq) {
  std::string out;
  for (TokenId id : seq.ids) {
    if (id == vocab.unknown_id()) {
      throw Error(ErrorCode::input, "cannot decode a sequence containing the unknown id");
    }
    if (id >= vocab.size()) {
      throw Error(ErrorCode::input, "token id " + std::to_string(id) + " outside the vocabulary");
    }
    if (!out.empty()) out.push_back(' ');
    out += vocab.words()[id];
  }
  return out;
}

std::string save_vocab(const WordVocab& vocab) {
  nlohmann::json doc = {
      {"format_version", kVocabFormatVersion},
      {"unit", "word"},
      {"unknown_id", 0},
      {"words", std::vector<std::string>(vocab.words().begin(), vocab.words().end())},
  };
  return doc.dump(1) + "\n";
}

}  // namespace authentext
