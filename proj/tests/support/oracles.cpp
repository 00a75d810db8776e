#include "oracles.hpp"

#include <algorithm>

#include "topicsent/baseline.hpp"
#include "topicsent/classifier.hpp"
#include "topicsent/gradcheck.hpp"
#include "topicsent/nn.hpp"
#include "topicsent/rng.hpp"
#include "topicsent/word2topic.hpp"

namespace topicsent::testing {
namespace {

Tensor random_tensor(Tensor::Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

double max_of(double a, double b) { return a > b ? a : b; }

}  // namespace

std::vector<GradCase> gradient_suite(std::uint64_t seed, double eps) {
  using namespace ag;
  Rng rng(seed);
  std::vector<GradCase> out;

  {
    nn::Dense first("d1", 4, 5, rng), second("d2", 5, 3, rng);
    const Tensor x = random_tensor({6, 4}, rng);
    const Tensor target = random_tensor({6, 3}, rng);
    auto params = first.parameters();
    for (auto* p : second.parameters()) params.push_back(p);
    for (auto* p : params) {
      for (double& v : p->value.values()) v += rng.uniform(-0.1, 0.1);
    }
    const auto loss = [&](Tape& tape) {
      return mse(second(tape, tanh(first(tape, tape.constant(x)))), target);
    };
    double err = grad_check_parameters(loss, params, eps);
    err = max_of(err, grad_check(
                          [&](Tape& tape, Var in) {
                            return mse(second(tape, tanh(first(tape, in))), target);
                          },
                          x, eps));
    out.push_back({"dense (2-layer MSE)", err});
  }
  {
    nn::Conv1d conv("conv", 3, 4, 3, rng);
    const Tensor x = random_tensor({2, 7, 3}, rng);
    const Tensor target = random_tensor({2, 5, 4}, rng);
    for (double& v : conv.parameters()[1]->value.values()) v = rng.uniform(-0.5, 0.5);
    double err = grad_check_parameters(
        [&](Tape& tape) { return mse(tanh(conv(tape, tape.constant(x))), target); },
        conv.parameters(), eps);
    err = max_of(err, grad_check(
                          [&](Tape& tape, Var in) { return mse(tanh(conv(tape, in)), target); },
                          x, eps));
    out.push_back({"conv1d", err});
  }
  {
    nn::Lstm lstm("lstm", 3, 4, rng);
    const Tensor x = random_tensor({2, 3}, rng);
    const Tensor h0 = random_tensor({2, 4}, rng);
    const Tensor c0 = random_tensor({2, 4}, rng);
    const Tensor target = random_tensor({2, 8}, rng, -0.5, 0.5);
    const auto step_loss = [&](Tape& tape, Var in, Var h, Var c) {
      const auto s = lstm.step(tape, in, {h, c});
      const Var parts[] = {s.h, s.c};
      return mse(concat_cols(parts), target);
    };
    double err = grad_check_parameters(
        [&](Tape& tape) {
          return step_loss(tape, tape.constant(x), tape.constant(h0), tape.constant(c0));
        },
        lstm.parameters(), eps);
    err = max_of(err, grad_check(
                          [&](Tape& tape, Var in) {
                            return step_loss(tape, in, tape.constant(h0), tape.constant(c0));
                          },
                          x, eps));
    err = max_of(err, grad_check(
                          [&](Tape& tape, Var h) {
                            return step_loss(tape, tape.constant(x), h, tape.constant(c0));
                          },
                          h0, eps));
    err = max_of(err, grad_check(
                          [&](Tape& tape, Var c) {
                            return step_loss(tape, tape.constant(x), tape.constant(h0), c);
                          },
                          c0, eps));
    out.push_back({"lstm step", err});
  }
  {
    nn::BiLstm bi("bilstm", 3, 4, rng);
    std::vector<Tensor> xs;
    for (int t = 0; t < 5; ++t) xs.push_back(random_tensor({2, 3}, rng));
    const Tensor target = random_tensor({2, 8}, rng, -0.5, 0.5);
    const auto seq_loss = [&](Tape& tape, Var first_step) {
      std::vector<Var> seq{first_step};
      for (std::size_t t = 1; t < xs.size(); ++t) seq.push_back(tape.constant(xs[t]));
      const auto run = bi.run(tape, seq);
      Var total = mse(run.final_state(), target);
      for (const auto& v : run.concat()) total = add(total, scale(sum(mul(v, v)), 0.01));
      return total;
    };
    double err = grad_check_parameters(
        [&](Tape& tape) { return seq_loss(tape, tape.constant(xs[0])); }, bi.parameters(), eps);
    err = max_of(err, grad_check(seq_loss, xs[0], eps));
    out.push_back({"bilstm sequence", err});
  }
  {
    const Tensor logits = random_tensor({4, 3}, rng, -3.0, 3.0);
    const std::vector<int> labels{0, 2, 1, 2};
    out.push_back({"softmax cross-entropy",
                   grad_check([&](Tape&, Var z) { return softmax_cross_entropy(z, labels); },
                              logits, eps)});
  }
  for (auto arch : {Word2TopicArch::kConv, Word2TopicArch::kDense}) {
    Word2TopicConfig cfg;
    cfg.arch = arch;
    cfg.seed = rng.next();
    cfg.embed_dim = 5;
    cfg.dense_widths = {7, 6};
    Word2TopicModel model(6, 3, cfg);
    // One-hot inputs leave most conv pre-activations at the bias, so zero
    // biases would sit exactly on the ReLU kink.
    for (auto* p : model.parameters()) {
      if (p->value.rank() != 1) continue;
      for (double& v : p->value.values()) v = rng.uniform(0.1, 0.3);
    }
    const Tensor target = random_tensor({6, 3}, rng);
    const std::vector<int> ids{0, 1, 2, 3, 4, 5};
    out.push_back({"phase-1 net n=6 t=3 (" + to_string(arch) + ")",
                   grad_check_parameters(
                       [&](Tape& tape) { return mse(model.forward(tape, ids).scores, target); },
                       model.parameters(), eps)});
  }
  for (auto concat : {TopicConcat::kPerTimestep, TopicConcat::kFinalState}) {
    ClassifierConfig cfg;
    cfg.pad_len = 4;
    cfg.embed_dim = 3;
    cfg.sentence_hidden = 3;
    cfg.topic_proj = 3;
    cfg.stack_hidden = 3;
    cfg.seed = rng.next();
    cfg.concat = concat;
    ClassifierModel model(cfg);
    std::vector<std::string> words{"a", "b", "c", "d", "e"};
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < words.size(); ++i) {
      rows.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    }
    const auto table = make_table(words, rows);
    const std::vector<int> ids{0, 3, 1, kPadId, 4, 2, kPadId, kPadId};
    // Topic vectors stay strictly positive so the ReLU projection is
    // differentiable at the checked point.
    const Tensor topics = random_tensor({2, 3}, rng, 0.5, 1.5);
    const std::vector<int> labels{2, 0};
    out.push_back({"phase-2 net pad 4 hidden 3 (" + to_string(concat) + ")",
                   grad_check_parameters(
                       [&](Tape& tape) {
                         return softmax_cross_entropy(model.logits(tape, ids, topics, table),
                                                      labels);
                       },
                       model.parameters(), eps)});
  }
  {
    const Tensor x = random_tensor({5, 4}, rng, -2.0, 2.0);
    const std::vector<int> labels{0, 1, 2, 1, 0};
    LogisticModel model(4, 3);
    for (auto* p : model.parameters()) {
      for (double& v : p->value.values()) v = rng.uniform(-0.5, 0.5);
    }
    out.push_back({"logistic regression",
                   grad_check_parameters(
                       [&](Tape& tape) { return model.loss(tape, x, labels, 0.01); },
                       model.parameters(), eps)});
  }
  return out;
}

LabelMatrix brute_force_labels(const std::vector<TweetRecord>& records, const Vocabulary& vocab,
                               const TopicIndex& topics) {
  const std::size_t n = vocab.size();
  const std::size_t t = topics.size();
  LabelMatrix out;
  out.values = Tensor::matrix(n, t);
  out.support.assign(n * t, 0);
  for (std::size_t w = 0; w < n; ++w) {
    const std::string& word = vocab.word(static_cast<int>(w));
    for (std::size_t a = 0; a < t; ++a) {
      const std::string& topic = topics.topic(static_cast<int>(a));
      double total = 0.0;
      std::uint32_t count = 0;
      for (const auto& rec : records) {
        if (rec.topic != topic) continue;
        if (std::find(rec.tokens.begin(), rec.tokens.end(), word) == rec.tokens.end()) continue;
        total += rec.score;
        ++count;
      }
      out.support[w * t + a] = count;
      out.values.at(w, a) = count == 0 ? 0.0 : (total / count) / 2.0;
    }
  }
  return out;
}

std::vector<TweetRecord> random_corpus(std::uint64_t seed, std::size_t max_tweets,
                                       std::size_t max_words, std::size_t max_topics) {
  Rng rng(seed);
  const std::size_t tweets = 1 + rng.below(max_tweets);
  const std::size_t words = 1 + rng.below(max_words);
  const std::size_t topics = 1 + rng.below(max_topics);
  std::vector<TweetRecord> out;
  for (std::size_t i = 0; i < tweets; ++i) {
    TweetRecord rec;
    rec.id = std::to_string(i);
    const std::size_t len = 1 + rng.below(8);
    for (std::size_t k = 0; k < len; ++k) rec.tokens.push_back("w" + std::to_string(rng.below(words)));
    for (const auto& tok : rec.tokens) rec.raw_text += (rec.raw_text.empty() ? "" : " ") + tok;
    rec.topic = "t" + std::to_string(rng.below(topics));
    rec.score = static_cast<int>(rng.below(5)) - 2;
    out.push_back(std::move(rec));
  }
  return out;
}

LabelMatrix toy_labels() {
  LabelMatrix labels;
  labels.values = Tensor::matrix(8, 2);
  for (std::size_t w = 0; w < 8; ++w) {
    labels.values.at(w, 0) = w < 4 ? 1.0 : -1.0;
    labels.values.at(w, 1) = w < 4 ? -1.0 : 1.0;
  }
  labels.support.assign(16, 1);
  return labels;
}

Vocabulary make_vocab(const std::vector<std::string>& words) {
  std::vector<StringIndex::Entry> entries;
  for (const auto& w : words) entries.push_back({w, 1});
  return Vocabulary(StringIndex(std::move(entries)), 1);
}

EmbeddingTable make_table(const std::vector<std::string>& words,
                          const std::vector<std::vector<double>>& rows) {
  const std::size_t dim = rows.empty() ? 0 : rows.front().size();
  Tensor emb = Tensor::matrix(rows.size(), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), emb.row(i).begin());
  }
  return EmbeddingTable(make_vocab(words), std::move(emb));
}

}  // namespace topicsent::testing
