#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "topicsent/checkpoint.hpp"
#include "topicsent/word2topic.hpp"

using namespace topicsent;

namespace {

struct Toy {
  Vocabulary vocab = topicsent::testing::make_vocab({"w0", "w1", "w2", "w3", "w4", "w5", "w6", "w7"});
  TopicIndex topics{StringIndex({{"t0", 1}, {"t1", 1}})};
  LabelMatrix labels = topicsent::testing::toy_labels();
};

Word2TopicConfig toy_config(Word2TopicArch arch = Word2TopicArch::kConv) {
  Word2TopicConfig c;
  c.arch = arch;
  c.epochs = 500;
  c.seed = 3;
  return c;
}

// One training run shared by the tests that only inspect its result.
const std::pair<Word2TopicModel, Word2TopicHistory>& trained_toy() {
  static const auto result = [] {
    Word2TopicHistory h;
    auto m = train_word2topic(Toy{}.labels, toy_config(), &h);
    return std::pair{std::move(m), std::move(h)};
  }();
  return result;
}

}  // namespace

TEST(Word2Topic, ToyTaskOverfits) {
  const auto& [model, history] = trained_toy();
  ASSERT_EQ(history.loss.size(), 500u);
  EXPECT_LT(history.loss.back(), 0.01);
  EXPECT_LE(history.loss.back(), history.loss.front());
  for (double l : history.loss) EXPECT_TRUE(std::isfinite(l));
}

TEST(Word2Topic, DenseArchitectureOverfitsToo) {
  Word2TopicHistory h;
  train_word2topic(Toy{}.labels, toy_config(Word2TopicArch::kDense), &h);
  EXPECT_LT(h.loss.back(), 0.01);
}

TEST(Word2Topic, SameSeedSameCurve) {
  auto cfg = toy_config();
  cfg.epochs = 40;
  Word2TopicHistory a, b;
  train_word2topic(Toy{}.labels, cfg, &a);
  train_word2topic(Toy{}.labels, cfg, &b);
  EXPECT_EQ(a.loss, b.loss);
}

TEST(Word2Topic, ZeroLearningRateFreezesModel) {
  auto cfg = toy_config();
  cfg.epochs = 5;
  cfg.lr = 0.0;
  Word2TopicHistory h;
  auto trained = train_word2topic(Toy{}.labels, cfg, &h);
  Word2TopicModel fresh(8, 2, cfg);
  const auto a = trained.parameters();
  const auto b = fresh.parameters();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i]->value, b[i]->value) << a[i]->name;
  for (double l : h.loss) EXPECT_EQ(l, h.loss.front());
}

TEST(Word2Topic, DivergenceNamesEpoch) {
  auto cfg = toy_config();
  cfg.epochs = 3;
  cfg.lr = 1e306;
  try {
    train_word2topic(Toy{}.labels, cfg);
    FAIL() << "expected divergence";
  } catch (const ag::NumericError& e) {
    // Adam bounds the first step by lr, so the overflow surfaces on the
    // next forward pass at the latest.
    EXPECT_THAT(e.what(), ::testing::ContainsRegex("diverged at epoch [12]"));
  }
}

TEST(Word2Topic, ArchitectureShapes) {
  Word2TopicConfig cfg;
  Word2TopicModel model(50, 7, cfg);
  ag::Tape tape;
  const std::vector<int> ids{0, 49, 3};
  const auto out = model.forward(tape, ids);
  EXPECT_EQ(out.embedding.value().shape(), (Tensor::Shape{3, 100}));
  EXPECT_EQ(out.scores.value().shape(), (Tensor::Shape{3, 7}));
  EXPECT_EQ(model.conv_width(), 5u);
  EXPECT_EQ(Word2TopicModel(3, 2, cfg).conv_width(), 2u);
  EXPECT_EQ(parse_word2topic_arch("dense"), Word2TopicArch::kDense);
  EXPECT_THROW(parse_word2topic_arch("cnn2d"), std::invalid_argument);
}

TEST(ExportTable, RowsMatchFreshForwardPass) {
  Toy toy;
  auto model = trained_toy().first;
  const auto table = export_table(model, toy.vocab, toy.topics, &toy.labels);
  for (int w = 0; w < 8; ++w) {
    ag::Tape tape;
    const std::vector<int> id{w};
    const auto out = model.forward(tape, id);
    const auto emb = table.embedding(w);
    const auto sc = table.scores(w);
    for (std::size_t j = 0; j < emb.size(); ++j) EXPECT_EQ(emb[j], out.embedding.value()[j]);
    for (std::size_t j = 0; j < sc.size(); ++j) {
      EXPECT_EQ(sc[j], out.scores.value()[j]);
      EXPECT_LT(std::abs(sc[j] - toy.labels.values.at(static_cast<std::size_t>(w), j)), 0.2);
    }
  }
  EXPECT_GT(word_topic_score(table, "w0", "t0"), 0.0);
  EXPECT_LT(word_topic_score(table, "w0", "t1"), 0.0);
}

TEST(ExportTable, PadAndUnknowns) {
  Toy toy;
  auto model = trained_toy().first;
  const auto table = export_table(model, toy.vocab, toy.topics);
  for (double v : table.embedding(kPadId)) EXPECT_EQ(v, 0.0);
  for (double v : table.scores(kPadId)) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(word_topic_score(table, std::string(kPadToken), "t1"), 0.0);
  EXPECT_THROW(word_topic_score(table, "nope", "t0"), UnknownWordError);
  EXPECT_THROW(word_topic_score(table, "w1", "nope"), UnknownTopicError);
  const auto small = topicsent::testing::make_vocab({"a", "b"});
  EXPECT_THROW(export_table(model, small, toy.topics), std::invalid_argument);
}

TEST(Word2Topic, CheckpointRoundTrip) {
  auto model = trained_toy().first;
  Checkpoint ckpt;
  model.save(ckpt);
  auto back = Word2TopicModel::load(Checkpoint::parse(ckpt.dump()));
  ag::Tape t1, t2;
  const std::vector<int> ids{0, 5};
  EXPECT_EQ(model.forward(t1, ids).scores.value(), back.forward(t2, ids).scores.value());
}

TEST(EmbeddingTable, SaveLoadAndTsv) {
  Toy toy;
  auto model = trained_toy().first;
  const auto table = export_table(model, toy.vocab, toy.topics, &toy.labels);
  Checkpoint ckpt;
  table.save(ckpt);
  const auto back = EmbeddingTable::load(Checkpoint::parse(ckpt.dump()));
  EXPECT_EQ(back.embedding_matrix(), table.embedding_matrix());
  EXPECT_EQ(back.score_matrix(), table.score_matrix());
  EXPECT_EQ(back.vocab(), table.vocab());
  EXPECT_TRUE(back.supported(0, 0));

  const auto from = EmbeddingTable::from_tsv(table.embeddings_tsv(), toy.vocab);
  EXPECT_EQ(from.embedding_matrix(), table.embedding_matrix());
  const auto bigger = topicsent::testing::make_vocab({"w0", "zzz"});
  const auto partial = EmbeddingTable::from_tsv(table.embeddings_tsv(), bigger);
  for (double v : partial.embedding(1)) EXPECT_EQ(v, 0.0);
  const auto first_line = table.scores_tsv().substr(0, table.scores_tsv().find('\n'));
  EXPECT_EQ(first_line.substr(0, 3), "w0\t");
}

TEST(EmbeddingTable, RandomIsSeeded) {
  const auto v = topicsent::testing::make_vocab({"a", "b", "c"});
  EXPECT_EQ(EmbeddingTable::random(v, 4, 1).embedding_matrix(),
            EmbeddingTable::random(v, 4, 1).embedding_matrix());
  EXPECT_NE(EmbeddingTable::random(v, 4, 1).embedding_matrix(),
            EmbeddingTable::random(v, 4, 2).embedding_matrix());
}
