#include <benchmark/benchmark.h>

#include "topicsent/autograd.hpp"
#include "topicsent/corpus.hpp"
#include "topicsent/nn.hpp"
#include "topicsent/rng.hpp"
#include "topicsent/vocab.hpp"
#include "topicsent/word2topic.hpp"

using namespace topicsent;

namespace {

Tensor random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Tensor t = Tensor::matrix(rows, cols);
  for (double& v : t.values()) v = rng.uniform(-1, 1);
  return t;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const Tensor a = random_matrix(n, n, rng), b = random_matrix(n, n, rng);
  for (auto _ : state) {
    ag::Tape tape;
    benchmark::DoNotOptimize(ag::matmul(tape.constant(a), tape.constant(b)).value());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(256);

// One forward and backward pass of a BiLSTM over a padded batch, the shape
// of the classifier's sentence block.
void BM_BiLstmStep(benchmark::State& state) {
  const std::size_t batch = 64, len = 30, dim = 100, hidden = 64;
  Rng rng(2);
  nn::BiLstm lstm("bench", dim, hidden, rng);
  std::vector<Tensor> inputs;
  for (std::size_t t = 0; t < len; ++t) inputs.push_back(random_matrix(batch, dim, rng));
  for (auto _ : state) {
    ag::Tape tape;
    std::vector<ag::Var> seq;
    for (const auto& x : inputs) seq.push_back(tape.constant(x));
    const auto out = lstm.run(tape, seq).concat();
    ag::Var loss = ag::mean(ag::mul(out.back(), out.back()));
    tape.backward(loss);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_BiLstmStep)->Unit(benchmark::kMillisecond);

void BM_CleanTweet(benchmark::State& state) {
  const std::string tweet =
      "RT @someone: Loving the new #iPhone!!! camera is soooo good http://t.co/xyz &amp; battery :)";
  for (auto _ : state) benchmark::DoNotOptimize(clean_tweet(tweet));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CleanTweet);

void BM_Word2TopicEpoch(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t t = 8;
  Rng rng(3);
  LabelMatrix labels;
  labels.values = Tensor::matrix(n, t);
  for (double& v : labels.values.values()) v = rng.uniform(-1, 1);
  labels.support.assign(n * t, 1);
  Word2TopicConfig cfg;
  cfg.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train_word2topic(labels, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Word2TopicEpoch)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
