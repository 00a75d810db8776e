#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include "topicsent/corpus.hpp"
#include "topicsent/rng.hpp"
#include "topicsent/textio.hpp"

using namespace topicsent;
using Tokens = std::vector<std::string>;

namespace {

std::vector<TweetRecord> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_dataset(in);
}

std::vector<TweetRecord> scored(const std::vector<int>& scores) {
  std::vector<TweetRecord> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    TweetRecord r;
    r.id = std::to_string(i);
    r.raw_text = "w" + std::to_string(i);
    r.tokens = {r.raw_text};
    r.topic = "t";
    r.score = scores[i];
    out.push_back(r);
  }
  return out;
}

std::size_t count_if_score(const std::vector<TweetRecord>& rs, int sign) {
  return static_cast<std::size_t>(std::count_if(rs.begin(), rs.end(), [&](const TweetRecord& r) {
    return (r.score > 0) - (r.score < 0) == sign;
  }));
}

std::string join(const Tokens& tokens) {
  std::string out;
  for (const auto& t : tokens) out += (out.empty() ? "" : " ") + t;
  return out;
}

}  // namespace

TEST(LoadDataset, ParsesRow) {
  const auto rs = parse("42\tI love this phone\tapple\t2\n");
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0].id, "42");
  EXPECT_EQ(rs[0].raw_text, "I love this phone");
  EXPECT_EQ(rs[0].topic, "apple");
  EXPECT_EQ(rs[0].score, 2);
  EXPECT_EQ(rs[0].tokens, (Tokens{"i", "love", "this", "phone"}));
  EXPECT_FALSE(rs[0].dropped);
}

TEST(LoadDataset, ScoreOutOfRangeNamesLine) {
  try {
    parse("42\tI love this phone\tapple\t2\n43\thi\tapple\t5\n");
    FAIL() << "expected DatasetError";
  } catch (const DatasetError& e) {
    EXPECT_EQ(std::string(e.what()), "score out of range at line 2");
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadDataset, KeepsFileOrder) {
  const auto rs = parse("1\ta\tx\t0\n2\tb\ty\t-1\r\n\n3\tc\tz\t1\n");
  ASSERT_EQ(rs.size(), 3u);
  EXPECT_EQ(rs[0].id, "1");
  EXPECT_EQ(rs[1].id, "2");
  EXPECT_EQ(rs[1].topic, "y");
  EXPECT_EQ(rs[2].id, "3");
}

TEST(LoadDataset, Errors) {
  EXPECT_THROW(parse(""), DatasetError);
  EXPECT_THROW(parse("1\tonly three\tfields\n"), DatasetError);
  EXPECT_THROW(parse("1\ttext\ttopic\tx\n"), DatasetError);
  EXPECT_THROW(parse("1\ttext\ttopic\t1.5\n"), DatasetError);
  EXPECT_THROW(load_dataset("/nonexistent/file.tsv"), DatasetError);
}

TEST(LoadDataset, FlagsTweetsWithoutTokens) {
  const auto rs = parse("1\t@someone http://x.y\tt\t0\n");
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_TRUE(rs[0].tokens.empty());
  EXPECT_TRUE(rs[0].dropped);
}

TEST(CleanTweet, Examples) {
  EXPECT_EQ(clean_tweet("@user Loving the NEW iPhone! http://t.co/x #blessed"),
            (Tokens{"loving", "the", "new", "iphone"}));
  EXPECT_EQ(clean_tweet("I #love it, truly"), (Tokens{"i", "love", "it", "truly"}));
  EXPECT_TRUE(clean_tweet("").empty());
}

TEST(CleanTweet, HtmlApostrophesAndTrailingRuns) {
  EXPECT_EQ(clean_tweet("<b>Don't</b> stop &amp; go"), (Tokens{"don't", "stop", "go"}));
  EXPECT_EQ(clean_tweet("great day #sun #fun"), (Tokens{"great", "day"}));
  EXPECT_EQ(clean_tweet("#only #tags"), Tokens{});
  EXPECT_EQ(clean_tweet("see www.example.com and https://a.b now"), (Tokens{"see", "and", "now"}));
  EXPECT_EQ(clean_tweet("caf\xc3\xa9 -- 100%!!"), (Tokens{"caf", "100"}));
}

TEST(CleanTweet, IdempotentOnRandomText) {
  const std::vector<std::string> pieces = {"Hello", "@bob", "#tag", "http://t.co/a", "don't", "&amp;",
                                           "<i>", "</i>", "42", "!!!", "MiXeD", "a,b", "#", "www.x.org",
                                           "it's", "\t", "  ", "&#39;", "o'neil", "x_y"};
  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const auto len = rng.below(12);
    for (std::size_t i = 0; i < len; ++i) text += pieces[rng.below(pieces.size())] + " ";
    const auto once = clean_tweet(text);
    EXPECT_EQ(clean_tweet(join(once)), once) << text;
    for (const auto& tok : once) {
      ASSERT_FALSE(tok.empty());
      for (char ch : tok) {
        EXPECT_TRUE((ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '\'') << tok;
      }
    }
  }
}

TEST(Rebalance, DropsAThirdOfPositiveAndNeutral) {
  std::vector<int> scores;
  for (int i = 0; i < 9; ++i) scores.push_back(i % 2 ? 1 : 2);
  for (int i = 0; i < 9; ++i) scores.push_back(0);
  for (int i = 0; i < 5; ++i) scores.push_back(-1);
  const auto out = rebalance(scored(scores), 1.0 / 3.0, 4);
  EXPECT_EQ(count_if_score(out, 1), 6u);
  EXPECT_EQ(count_if_score(out, 0), 6u);
  EXPECT_EQ(count_if_score(out, -1), 5u);
}

TEST(Rebalance, ZeroFractionIsIdentityAndSeedIsDeterministic) {
  const auto input = scored({2, 1, 0, 0, -2, 1, 0, -1, 2});
  EXPECT_EQ(rebalance(input, 0.0, 1), input);
  EXPECT_EQ(rebalance(input, 0.5, 9), rebalance(input, 0.5, 9));
  EXPECT_THROW(rebalance(input, 1.0, 1), std::invalid_argument);
}

TEST(Rebalance, PreservesOrderAndNegatives) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> scores;
    const auto n = 1 + rng.below(60);
    for (std::size_t i = 0; i < n; ++i) scores.push_back(static_cast<int>(rng.below(5)) - 2);
    const auto input = scored(scores);
    const auto out = rebalance(input, rng.uniform(0.0, 0.99), rng.next());
    EXPECT_EQ(count_if_score(out, -1), count_if_score(input, -1));
    for (std::size_t i = 1; i < out.size(); ++i) EXPECT_LT(std::stoi(out[i - 1].id), std::stoi(out[i].id));
  }
}

TEST(Split, PaperSizes) {
  std::vector<int> scores(16895, 0);
  const auto s = split(scored(scores), 13300, 700, 1);
  EXPECT_EQ(s.train.size(), 13300u);
  EXPECT_EQ(s.validation.size(), 700u);
  EXPECT_EQ(s.test.size(), 2895u);
  EXPECT_EQ(s.seed, 1u);
}

TEST(Split, BoundaryAndOverflow) {
  const auto input = scored(std::vector<int>(10, 1));
  EXPECT_TRUE(split(input, 10, 0, 3).test.empty());
  EXPECT_THROW(split(input, 8, 3, 3), std::invalid_argument);
}

TEST(Split, PartitionsByIdAndIsDeterministic) {
  const auto input = scored(std::vector<int>(57, -1));
  const auto a = split(input, 30, 7, 11);
  const auto b = split(input, 30, 7, 11);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  std::set<std::string> ids;
  for (const auto* part : {&a.train, &a.validation, &a.test}) {
    for (const auto& r : *part) EXPECT_TRUE(ids.insert(r.id).second);
  }
  EXPECT_EQ(ids.size(), input.size());
}

TEST(Split, SaveLoadRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "topicsent_split_test";
  std::filesystem::remove_all(dir);
  auto input = scored({2, -1, 0, 1, -2, 0, 1});
  input[0].raw_text = "Hello @x World #tag";
  input[0].tokens = clean_tweet(input[0].raw_text);
  const auto s = split(input, 4, 1, 5);
  save_splits(s, dir);
  const auto back = load_splits(dir);
  EXPECT_EQ(back.train, s.train);
  EXPECT_EQ(back.validation, s.validation);
  EXPECT_EQ(back.test, s.test);
  EXPECT_EQ(back.seed, 5u);
  const auto manifest = textio::read_file(dir / "manifest.json");
  EXPECT_NE(manifest.find("\"seed\": 5"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(ClassOf, ThreeClassDependsOnlyOnSign) {
  EXPECT_EQ(class_of(-2, 3), 0);
  EXPECT_EQ(class_of(-1, 3), 0);
  EXPECT_EQ(class_of(0, 3), 1);
  EXPECT_EQ(class_of(1, 3), 2);
  EXPECT_EQ(class_of(2, 3), 2);
  for (int s = -2; s <= 2; ++s) EXPECT_EQ(class_of(s, 5), s + 2);
  EXPECT_THROW(class_of(0, 4), std::invalid_argument);
}
