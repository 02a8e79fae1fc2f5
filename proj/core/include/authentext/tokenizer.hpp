#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace authentext {

using TokenId = std::uint32_t;

struct TokenSequence {
  std::vector<TokenId> ids;

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

struct MergeRule {
  std::string left;
  std::string right;
  std::string merged;  // left + right
  std::size_t rank = 0;

  friend bool operator==(const MergeRule&, const MergeRule&) = default;
};

/// Private-use code points reserved for the two special symbols. Training
/// rejects text containing them; encoding maps them to the unknown id.
inline constexpr std::string_view kEndOfWordMarker = "\xEE\x80\x80";  // U+E000
inline constexpr std::string_view kUnknownSymbol = "\xEE\x80\x81";    // U+E001
inline constexpr int kVocabFormatVersion = 1;

/// Ordered merge rules plus the symbol table they produce. Immutable once
/// built; safe to share between threads.
class BpeVocab {
 public:
  /// Validates and indexes a vocabulary. `symbols` is in id order; merges are
  /// in rank order. Throws Error(input) naming the offending field.
  BpeVocab(std::vector<std::string> symbols,
           std::vector<std::pair<std::string, std::string>> merges,
           std::string end_of_word_marker = std::string(kEndOfWordMarker),
           TokenId unknown_id = 0);

  std::span<const MergeRule> merges() const noexcept { return merges_; }
  std::span<const std::string> symbols() const noexcept { return symbols_; }
  std::size_t size() const noexcept { return symbols_.size(); }
  const std::string& symbol(TokenId id) const { return symbols_.at(id); }
  std::optional<TokenId> find(std::string_view symbol) const;

  const std::string& end_of_word_marker() const noexcept { return marker_; }
  TokenId end_of_word_id() const noexcept { return marker_id_; }
  TokenId unknown_id() const noexcept { return unknown_id_; }

  /// Symbol ids of one whitespace-free word after all merges, marker included.
  std::vector<TokenId> encode_word(std::u32string_view word) const;

  friend bool operator==(const BpeVocab& a, const BpeVocab& b) {
    return a.symbols_ == b.symbols_ && a.merges_ == b.merges_ && a.marker_ == b.marker_ &&
           a.unknown_id_ == b.unknown_id_;
  }

 private:
  struct MergeTarget {
    std::size_t rank;
    TokenId merged;
  };

  static std::uint64_t pair_key(TokenId l, TokenId r) noexcept {
    return (static_cast<std::uint64_t>(l) << 32) | r;
  }

  std::vector<std::string> symbols_;
  std::vector<MergeRule> merges_;
  std::string marker_;
  TokenId marker_id_ = 0;
  TokenId unknown_id_ = 0;
  std::unordered_map<std::string, TokenId> ids_;
  std::unordered_map<std::uint64_t, MergeTarget> merge_index_;
};

struct BpeTrainOptions {
  std::size_t vocab_size = 5000;
  std::size_t max_merges = 0;  // 0 = no limit besides vocab_size
};

/// Number of symbols before any merge: distinct characters plus the
/// end-of-word marker and the unknown symbol.
std::size_t initial_symbol_count(std::span<const std::string> texts);

/// Classical BPE: characters of each whitespace-delimited word plus an
/// end-of-word marker; repeatedly merges the most frequent adjacent pair
/// (ties: lexicographically smallest (left, right) by UTF-8 bytes) until the
/// symbol table reaches vocab_size or no pair occurs at least twice.
/// Symbol ids: 0 = unknown, 1 = marker, then characters in code point order,
/// then merged symbols in the order they first appear.
BpeVocab train_bpe(std::span<const std::string> texts, const BpeTrainOptions& options);

/// Whitespace split, per-word decomposition, merges replayed in rank order.
TokenSequence encode(const BpeVocab& vocab, std::string_view text);

/// Concatenates symbols, end-of-word markers become single spaces, trailing
/// space trimmed. Error(input) when the sequence holds the unknown id.
std::string decode(const BpeVocab& vocab, const TokenSequence& seq);

/// Canonical JSON document; byte-identical for equal vocabularies.
std::string save_vocab(const BpeVocab& vocab);
BpeVocab load_vocab(std::string_view bytes);

/// Whole-word vocabulary used when TF-IDF runs on whitespace tokens instead
/// of BPE subwords. Id 0 is the unknown word.
class WordVocab {
 public:
  explicit WordVocab(std::vector<std::string> words);

  std::span<const std::string> words() const noexcept { return words_; }
  std::size_t size() const noexcept { return words_.size(); }
  TokenId unknown_id() const noexcept { return 0; }
  std::optional<TokenId> find(std::string_view word) const;

  friend bool operator==(const WordVocab& a, const WordVocab& b) { return a.words_ == b.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, TokenId> ids_;
};

/// Keeps the vocab_size - 1 most frequent words (ties by byte order) that
/// occur at least twice.
WordVocab train_word_vocab(std::span<const std::string> texts, std::size_t vocab_size);
TokenSequence encode(const WordVocab& vocab, std::string_view text);
std::string decode(const WordVocab& vocab, const TokenSequence& seq);
std::string save_vocab(const WordVocab& vocab);

enum class TokenUnit { bpe, word };

std::string_view token_unit_name(TokenUnit unit) noexcept;
TokenUnit token_unit_from_name(std::string_view name);

/// Either tokenizer kind behind one encode contract; this is what the
/// vocabulary file on disk deserializes to.
class Tokenizer {
 public:
  explicit Tokenizer(BpeVocab vocab) : vocab_(std::move(vocab)) {}
  explicit Tokenizer(WordVocab vocab) : vocab_(std::move(vocab)) {}

  TokenUnit unit() const noexcept {
    return std::holds_alternative<BpeVocab>(vocab_) ? TokenUnit::bpe : TokenUnit::word;
  }
  std::size_t size() const noexcept;
  const BpeVocab* bpe() const noexcept { return std::get_if<BpeVocab>(&vocab_); }
  const WordVocab* words() const noexcept { return std::get_if<WordVocab>(&vocab_); }

  TokenSequence encode(std::string_view text) const;

  /// Encodes every text with a per-call word cache; output is independent of
  /// `threads`.
  std::vector<TokenSequence> encode_all(std::span<const std::string> texts,
                                        unsigned threads = 1) const;

  std::string serialize() const;
  static Tokenizer parse(std::string_view bytes);

 private:
  std::variant<BpeVocab, WordVocab> vocab_;
};

}  // namespace authentext
