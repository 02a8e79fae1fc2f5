#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace authentext {

/// 1 = AI-generated (the positive class everywhere), 0 = human.
using Label = std::uint8_t;

struct Document {
  std::string id;
  std::string text;

  friend bool operator==(const Document&, const Document&) = default;
};

/// Documents with parallel binary labels. Construction validates that the
/// lists are the same length, labels are 0/1 and ids are non-empty and unique.
class LabeledCorpus {
 public:
  LabeledCorpus() = default;
  LabeledCorpus(std::vector<Document> documents, std::vector<Label> labels);

  std::size_t size() const noexcept { return documents_.size(); }
  bool empty() const noexcept { return documents_.empty(); }

  std::span<const Document> documents() const noexcept { return documents_; }
  std::span<const Label> labels() const noexcept { return labels_; }
  const Document& document(std::size_t i) const { return documents_.at(i); }
  Label label(std::size_t i) const { return labels_.at(i); }

  std::size_t count(Label label) const noexcept;
  std::vector<std::string> texts() const;

  friend bool operator==(const LabeledCorpus&, const LabeledCorpus&) = default;

 private:
  std::vector<Document> documents_;
  std::vector<Label> labels_;
};

enum class CorpusFormat { csv, jsonl };

CorpusFormat corpus_format_from_name(std::string_view name);
/// Guesses from the extension (.csv / .jsonl / .json); nullopt otherwise.
std::optional<CorpusFormat> corpus_format_from_path(const std::filesystem::path& path);

/// Parses a labeled dataset. CSV needs the header `id,text,label`; JSONL needs
/// one object per line with `id`, `text` and `label`. Input must be UTF-8.
LabeledCorpus parse_corpus(std::string_view data, CorpusFormat format);
LabeledCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format);

/// Like parse_corpus, but the label column/key is optional (prediction input).
/// Labels that are present are still validated.
std::vector<Document> parse_documents(std::string_view data, CorpusFormat format);
std::vector<Document> load_documents(const std::filesystem::path& path, CorpusFormat format);

std::string serialize_corpus(const LabeledCorpus& corpus, CorpusFormat format);
void save_corpus(const LabeledCorpus& corpus, const std::filesystem::path& path,
                 CorpusFormat format);

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct CorpusSplit {
  LabeledCorpus train;
  LabeledCorpus test;
};

/// Stratified split. Each class contributes round(test_fraction * n_class)
/// documents to the test part, clamped so that a class with two or more
/// documents lands in both parts. Membership is drawn from the "split"
/// sub-stream of `spec.seed`; both parts keep the input order.
CorpusSplit split_corpus(const LabeledCorpus& corpus, const SplitSpec& spec);

inline constexpr std::size_t kSynthLexiconSize = 2000;
inline constexpr std::size_t kSynthMinLength = 50;
inline constexpr std::size_t kSynthMaxLength = 200;

/// Shared pseudo-word lexicon used by the synthetic generator.
const std::vector<std::string>& synth_lexicon();

/// Per-rank word indices of the two generators at `divergence`. Human ranks
/// are the identity; the AI ranking interpolates towards a half-rotation of
/// the lexicon, which at divergence 1 makes the top halves disjoint.
std::vector<std::size_t> synth_ai_ranking(double divergence);

/// Synthetic human-vs-AI corpus: two Zipf unigram generators over the shared
/// lexicon whose rank orders drift apart as `divergence` goes from 0 to 1.
/// Documents alternate human/AI. Deterministic in seed ("synth" sub-stream).
LabeledCorpus synth_corpus(std::size_t n_per_class, std::uint64_t seed, double divergence);

}  // namespace authentext
