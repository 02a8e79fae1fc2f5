#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "authentext/corpus.hpp"
#include "authentext/error.hpp"
#include "authentext/io.hpp"
#include "support.hpp"

using namespace authentext;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::usage;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

LabeledCorpus balanced(std::size_t per_class) {
  std::vector<Document> docs;
  std::vector<Label> labels;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    docs.push_back({"d" + std::to_string(i), "text " + std::to_string(i)});
    labels.push_back(static_cast<Label>(i % 2));
  }
  return LabeledCorpus(std::move(docs), std::move(labels));
}

}  // namespace

TEST(LoadCorpus, CsvRowsInFileOrder) {
  const auto c = parse_corpus("id,text,label\nd1,hello,0\nd2,world,1\n", CorpusFormat::csv);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.document(0).id, "d1");
  EXPECT_EQ(c.document(1).text, "world");
  EXPECT_EQ(std::vector<Label>(c.labels().begin(), c.labels().end()), (std::vector<Label>{0, 1}));
}

TEST(LoadCorpus, HeaderOnlyIsEmpty) {
  EXPECT_EQ(parse_corpus("id,text,label\n", CorpusFormat::csv).size(), 0u);
  EXPECT_EQ(parse_corpus("", CorpusFormat::jsonl).size(), 0u);
}

TEST(LoadCorpus, LabelOutOfRangeNamesLine) {
  const auto bad = [] { parse_corpus("id,text,label\nd1,a,0\nd2,b,2\n", CorpusFormat::csv); };
  EXPECT_EQ(code_of(bad), ErrorCode::input);
  EXPECT_EQ(message_of(bad), "label out of range at line 3");
  const auto bad_json = [] {
    parse_corpus("{\"id\":\"a\",\"text\":\"x\",\"label\":0}\n{\"id\":\"b\",\"text\":\"y\",\"label\":2}\n",
                 CorpusFormat::jsonl);
  };
  EXPECT_EQ(message_of(bad_json), "label out of range at line 2");
}

TEST(LoadCorpus, MalformedRowsReportLine) {
  EXPECT_NE(message_of([] { parse_corpus("id,text,label\nd1,a\n", CorpusFormat::csv); }).find("line 2"),
            std::string::npos);
  EXPECT_NE(message_of([] { parse_corpus("{\"id\":\"a\",\"text\":\"x\",\"label\":0}\n{oops\n", CorpusFormat::jsonl); })
                .find("line 2"),
            std::string::npos);
  EXPECT_EQ(code_of([] { parse_corpus("id,text,label\nd1,a,zero\n", CorpusFormat::csv); }), ErrorCode::parse);
}

TEST(LoadCorpus, DuplicateIdRejected) {
  const auto dup = [] { parse_corpus("id,text,label\nd1,a,0\nd1,b,1\n", CorpusFormat::csv); };
  EXPECT_NE(message_of(dup).find("d1"), std::string::npos);
}

TEST(LoadCorpus, UndecodableBytesRejected) {
  const auto bad = [] { parse_corpus("id,text,label\nd1,caf\xE9,0\n", CorpusFormat::csv); };
  EXPECT_EQ(code_of(bad), ErrorCode::parse);
  EXPECT_NE(message_of(bad).find("line 2"), std::string::npos);
}

TEST(LoadCorpus, JsonlRejectsUnknownKeysAndNonIntegerLabels) {
  EXPECT_EQ(code_of([] { parse_corpus("{\"id\":\"a\",\"text\":\"x\",\"label\":0,\"extra\":1}\n", CorpusFormat::jsonl); }),
            ErrorCode::parse);
  EXPECT_EQ(code_of([] { parse_corpus("{\"id\":\"a\",\"text\":\"x\",\"label\":0.5}\n", CorpusFormat::jsonl); }),
            ErrorCode::parse);
}

TEST(LoadCorpus, UnlabeledDocuments) {
  const auto docs = parse_documents("id,text\na,one\nb,two\n", CorpusFormat::csv);
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[1].text, "two");
  EXPECT_THROW(parse_corpus("id,text\na,one\n", CorpusFormat::csv), Error);
}

TEST(CorpusRoundTrip, BothFormatsReproduceEverything) {
  const LabeledCorpus c({{"a", "plain"},
                         {"b,comma", "quote \" and, comma\nnewline"},
                         {"c", ""},
                         {"d", "unicode \xE5\xAD\x97 \xF0\x9F\x98\x80"}},
                        {0, 1, 1, 0});
  test::TempDir dir;
  for (auto fmt : {CorpusFormat::csv, CorpusFormat::jsonl}) {
    const auto path = dir / (fmt == CorpusFormat::csv ? "c.csv" : "c.jsonl");
    save_corpus(c, path, fmt);
    EXPECT_EQ(load_corpus(path, fmt), c);
  }
  const auto synth = synth_corpus(20, 1, 0.5);
  for (auto fmt : {CorpusFormat::csv, CorpusFormat::jsonl}) {
    EXPECT_EQ(parse_corpus(serialize_corpus(synth, fmt), fmt), synth);
  }
}

TEST(CorpusFormat, FromPathAndName) {
  EXPECT_EQ(corpus_format_from_path("x/y.csv"), CorpusFormat::csv);
  EXPECT_EQ(corpus_format_from_path("y.jsonl"), CorpusFormat::jsonl);
  EXPECT_FALSE(corpus_format_from_path("y.txt").has_value());
  EXPECT_EQ(corpus_format_from_name("csv"), CorpusFormat::csv);
  EXPECT_THROW(corpus_format_from_name("xml"), Error);
}

TEST(SplitCorpus, TenDocumentsOnePerClassInTest) {
  const auto s = split_corpus(balanced(5), {0.2, 7});
  EXPECT_EQ(s.train.size(), 8u);
  EXPECT_EQ(s.test.size(), 2u);
  EXPECT_EQ(s.test.count(0), 1u);
  EXPECT_EQ(s.test.count(1), 1u);
}

TEST(SplitCorpus, DeterministicAndSeedSensitive) {
  const auto c = balanced(50);
  const auto a = split_corpus(c, {0.2, 1});
  EXPECT_EQ(split_corpus(c, {0.2, 1}).test, a.test);
  EXPECT_EQ(serialize_corpus(split_corpus(c, {0.2, 1}).train, CorpusFormat::jsonl),
            serialize_corpus(a.train, CorpusFormat::jsonl));
  EXPECT_NE(split_corpus(c, {0.2, 2}).test, a.test);
}

TEST(SplitCorpus, PartitionPropertyAcrossFractionsAndSeeds) {
  const auto c = synth_corpus(37, 3, 0.4);
  for (double f : {0.1, 0.25, 0.5, 0.9}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto s = split_corpus(c, {f, seed});
      std::multiset<std::string> ids;
      for (const auto& d : s.train.documents()) ids.insert(d.id);
      for (const auto& d : s.test.documents()) ids.insert(d.id);
      ASSERT_EQ(ids.size(), c.size());
      for (const auto& d : c.documents()) ASSERT_EQ(ids.count(d.id), 1u);
      for (Label y : {Label{0}, Label{1}}) {
        const double want = f * static_cast<double>(c.count(y));
        EXPECT_LE(std::abs(static_cast<double>(s.test.count(y)) - want), 1.0);
        EXPECT_GE(s.test.count(y), 1u);
        EXPECT_GE(s.train.count(y), 1u);
      }
      // Both parts keep the corpus order.
      std::vector<std::size_t> pos;
      for (const auto& d : s.test.documents()) {
        pos.push_back(static_cast<std::size_t>(std::stoul(d.id.substr(6))));
      }
      EXPECT_TRUE(std::is_sorted(pos.begin(), pos.end()));
    }
  }
}

TEST(SplitCorpus, TooSmallOrBadFraction) {
  EXPECT_THROW(split_corpus(LabeledCorpus({{"a", "x"}}, {1}), {0.5, 0}), Error);
  EXPECT_THROW(split_corpus(balanced(5), {0.0, 0}), Error);
  EXPECT_THROW(split_corpus(balanced(5), {1.0, 0}), Error);
}

TEST(SynthCorpus, CountsLabelsDeterminism) {
  const auto a = synth_corpus(5, 42, 0.0);
  EXPECT_EQ(a.size(), 10u);
  EXPECT_EQ(a.count(0), 5u);
  EXPECT_EQ(a.count(1), 5u);
  EXPECT_EQ(synth_corpus(5, 42, 0.0), a);
  EXPECT_NE(synth_corpus(5, 43, 0.0), a);
  for (const auto& d : synth_corpus(30, 9, 1.0).documents()) {
    const auto words = std::count(d.text.begin(), d.text.end(), ' ') + 1;
    EXPECT_GE(words, static_cast<long>(kSynthMinLength));
    EXPECT_LE(words, static_cast<long>(kSynthMaxLength));
  }
  EXPECT_THROW(synth_corpus(0, 1, 0.5), Error);
  EXPECT_THROW(synth_corpus(3, 1, 1.2), Error);
}

TEST(SynthCorpus, RankingInterpolatesToDisjointTopHalves) {
  const auto same = synth_ai_ranking(0.0);
  for (std::size_t r = 0; r < same.size(); ++r) ASSERT_EQ(same[r], r);
  const auto far = synth_ai_ranking(1.0);
  std::set<std::size_t> ai_top(far.begin(), far.begin() + kSynthLexiconSize / 2);
  for (std::size_t w = 0; w < kSynthLexiconSize / 2; ++w) EXPECT_FALSE(ai_top.contains(w));
  // Every ranking is a permutation of the lexicon.
  for (double d : {0.1, 0.5, 0.8}) {
    auto r = synth_ai_ranking(d);
    std::sort(r.begin(), r.end());
    for (std::size_t i = 0; i < r.size(); ++i) ASSERT_EQ(r[i], i);
  }
  EXPECT_EQ(synth_lexicon().size(), kSynthLexiconSize);
  EXPECT_EQ(std::set<std::string>(synth_lexicon().begin(), synth_lexicon().end()).size(),
            kSynthLexiconSize);
}
