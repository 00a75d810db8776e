#include <gtest/gtest.h>

#include "oracles.hpp"
#include "topicsent/corpus.hpp"
#include "topicsent/rng.hpp"
#include "topicsent/vocab.hpp"

using namespace topicsent;
using Tokens = std::vector<std::string>;

namespace {

TweetRecord rec(const std::string& text, const std::string& topic, int score) {
  TweetRecord r;
  r.id = text;
  r.raw_text = text;
  r.tokens = clean_tweet(text);
  r.topic = topic;
  r.score = score;
  return r;
}

}  // namespace

TEST(Vocabulary, ThresholdBoundary) {
  const std::vector<TweetRecord> rs = {rec("good meh", "a", 1), rec("good meh", "a", 1),
                                       rec("good", "a", 1)};
  const auto v = Vocabulary::build(rs, 3);
  EXPECT_TRUE(v.contains("good"));
  EXPECT_FALSE(v.contains("meh"));
  EXPECT_EQ(v.min_freq(), 3u);
}

TEST(Vocabulary, MinFreqOneKeepsEveryToken) {
  const std::vector<TweetRecord> rs = {rec("b a c", "x", 0), rec("a d", "x", 0)};
  const auto v = Vocabulary::build(rs, 1);
  EXPECT_EQ(v.size(), 4u);
}

TEST(Vocabulary, IdsByFrequencyThenLexicographic) {
  const std::vector<TweetRecord> rs = {rec("zeta beta alpha", "x", 0), rec("zeta beta", "x", 0),
                                       rec("zeta gamma", "x", 0)};
  const auto v = Vocabulary::build(rs, 1);
  EXPECT_EQ(v.word(0), "zeta");
  EXPECT_EQ(v.word(1), "beta");
  EXPECT_EQ(v.word(2), "alpha");
  EXPECT_EQ(v.word(3), "gamma");
  EXPECT_EQ(v.frequency(0), 3u);
}

TEST(Vocabulary, AllFilteredThrows) {
  const std::vector<TweetRecord> rs = {rec("once", "x", 0)};
  EXPECT_THROW(Vocabulary::build(rs, 2), std::exception);
}

TEST(Vocabulary, TsvRoundTrip) {
  const std::vector<TweetRecord> rs = {rec("a b b c c c", "x", 0)};
  const auto v = Vocabulary::build(rs, 1);
  EXPECT_EQ(v.to_tsv(), "c\t0\t3\nb\t1\t2\na\t2\t1\n");
  EXPECT_EQ(StringIndex::from_tsv(v.to_tsv()), static_cast<const StringIndex&>(v));
}

TEST(TopicIndex, Lexicographic) {
  const std::vector<TweetRecord> rs = {rec("a", "samsung", 0), rec("a", "apple", 0),
                                       rec("a", "samsung", 0)};
  const auto t = TopicIndex::build(rs);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t.topic(0), "apple");
  EXPECT_EQ(t.topic(1), "samsung");
  EXPECT_EQ(t.frequency(1), 2u);
}

TEST(EncodeTweet, PadsTruncatesAndDropsOov) {
  const auto v = topicsent::testing::make_vocab({"a", "b", "c", "d"});
  const auto four = encode_tweet(Tokens{"a", "b", "c", "d"}, v, 30);
  ASSERT_EQ(four.size(), 30u);
  EXPECT_EQ(std::count(four.begin(), four.end(), kPadId), 26);
  EXPECT_EQ(four[3], 3);

  Tokens many;
  for (int i = 0; i < 35; ++i) many.push_back(i % 2 ? "b" : "c");
  const auto cut = encode_tweet(many, v, 30);
  ASSERT_EQ(cut.size(), 30u);
  EXPECT_EQ(cut[0], 2);
  EXPECT_EQ(cut[29], 1);

  const auto oov = encode_tweet(Tokens{"x", "y"}, v, 30);
  EXPECT_EQ(std::count(oov.begin(), oov.end(), kPadId), 30);

  const auto mixed = encode_tweet(Tokens{"x", "b", "y", "a"}, v, 3);
  EXPECT_EQ(mixed, (std::vector<int>{1, 0, kPadId}));
  EXPECT_EQ(decode_tweet(mixed, v), (Tokens{"b", "a"}));
}

TEST(LabelMatrix, MeanOverTweetsDividedByTwo) {
  const std::vector<TweetRecord> rs = {rec("good match", "T1", 2), rec("good grief", "T1", 1),
                                       rec("bad", "T1", -2), rec("fine", "T2", 0)};
  const auto v = Vocabulary::build(rs, 1);
  const auto t = TopicIndex::build(rs);
  const auto m = build_label_matrix(rs, v, t);
  const auto good = static_cast<std::size_t>(*v.find("good"));
  const auto bad = static_cast<std::size_t>(*v.find("bad"));
  EXPECT_EQ(m.values.at(good, 0), 0.75);
  EXPECT_EQ(m.support_at(good, 0), 2u);
  EXPECT_EQ(m.values.at(good, 1), 0.0);
  EXPECT_EQ(m.support_at(good, 1), 0u);
  EXPECT_EQ(m.values.at(bad, 0), -1.0);
}

TEST(LabelMatrix, RepeatsCountOncePerTweetUnlessConfigured) {
  const std::vector<TweetRecord> rs = {rec("wow wow wow", "T", 2), rec("wow", "T", -2)};
  const auto v = Vocabulary::build(rs, 1);
  const auto t = TopicIndex::build(rs);
  EXPECT_EQ(build_label_matrix(rs, v, t).values.at(0, 0), 0.0);
  EXPECT_EQ(build_label_matrix(rs, v, t, true).values.at(0, 0), 0.5);
}

TEST(LabelMatrix, MatchesBruteForceOracle) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto rs = topicsent::testing::random_corpus(seed, 50, 20, 5);
    const std::size_t min_freq = 1 + seed % 3;
    Vocabulary v;
    try {
      v = Vocabulary::build(rs, min_freq);
    } catch (const std::exception&) {
      v = Vocabulary::build(rs, 1);
    }
    const auto t = TopicIndex::build(rs);
    const auto got = build_label_matrix(rs, v, t);
    const auto want = topicsent::testing::brute_force_labels(rs, v, t);
    ASSERT_EQ(got.values, want.values) << "seed " << seed;
    ASSERT_EQ(got.support, want.support) << "seed " << seed;
    for (std::size_t i = 0; i < got.values.size(); ++i) {
      EXPECT_LE(std::abs(got.values[i]), 1.0);
      if (got.support[i] == 0) EXPECT_EQ(got.values[i], 0.0);
    }
  }
}

TEST(LabelMatrix, UnknownTopicThrows) {
  const std::vector<TweetRecord> rs = {rec("a", "T", 1)};
  const auto v = Vocabulary::build(rs, 1);
  const TopicIndex none;
  EXPECT_THROW(build_label_matrix(rs, v, none), std::exception);
}
