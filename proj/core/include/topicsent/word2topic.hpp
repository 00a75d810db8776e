#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topicsent/checkpoint.hpp"
#include "topicsent/embedding_table.hpp"
#include "topicsent/nn.hpp"
#include "topicsent/vocab.hpp"

namespace topicsent {

enum class Word2TopicArch { kConv, kDense };

std::string to_string(Word2TopicArch arch);
Word2TopicArch parse_word2topic_arch(std::string_view text);

struct Word2TopicConfig {
  Word2TopicArch arch = Word2TopicArch::kConv;
  std::size_t epochs = 50;
  double lr = 0.001;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  std::size_t embed_dim = 100;
  std::size_t conv_width = 5;
  std::size_t conv1_filters = 8;
  std::size_t conv2_filters = 16;
  std::vector<std::size_t> dense_widths = {512, 256, 128};
};

/// Phase-1 network mapping one-hot(word) to the word's row of the label
/// matrix. Its penultimate activation (embed_dim wide) is the word
/// embedding; the final linear layer gives the t topic scores.
///
/// kConv:  conv1d(w, 8) > ReLU > conv1d(w, 16) > ReLU > dense(embed) > dense(t)
/// kDense: dense(512) > ReLU > dense(256) > ReLU > dense(128) > ReLU >
///         dense(embed) > dense(t)
///
/// The conv width w is min(conv_width, (n - 1) / 2 + 1) so that the two
/// valid convolutions leave at least one position on small vocabularies.
class Word2TopicModel {
 public:
  struct Output {
    ag::Var embedding;  // [batch, embed_dim]
    ag::Var scores;     // [batch, t]
  };

  Word2TopicModel() = default;
  Word2TopicModel(std::size_t words, std::size_t topics, const Word2TopicConfig& config);

  Output forward(ag::Tape& tape, std::span<const int> word_ids);
  std::vector<ag::Parameter*> parameters();

  std::size_t words() const { return words_; }
  std::size_t topics() const { return topics_; }
  std::size_t embed_dim() const { return config_.embed_dim; }
  std::size_t conv_width() const { return conv_width_; }
  const Word2TopicConfig& config() const { return config_; }

  void save(Checkpoint& ckpt) const;
  static Word2TopicModel load(const Checkpoint& ckpt);

 private:
  std::size_t words_ = 0;
  std::size_t topics_ = 0;
  std::size_t conv_width_ = 0;
  Word2TopicConfig config_;
  nn::Conv1d conv1_, conv2_;
  std::vector<nn::Dense> dense_;  // kDense: hidden stack; kConv: empty
  ag::Parameter input_weight_;     // kDense: first layer as an [n, w0] lookup
  ag::Parameter input_bias_;
  nn::Dense embed_;
  nn::Dense output_;
};

struct Word2TopicHistory {
  /// Mean squared error over the whole label matrix, one entry per epoch,
  /// measured on the forward passes of that epoch.
  std::vector<double> loss;
};

using EpochCallback = std::function<void(std::size_t epoch, double loss)>;

/// Adam on per-word minibatches. Throws ag::NumericError naming the epoch if
/// the loss stops being finite.
Word2TopicModel train_word2topic(const LabelMatrix& labels, const Word2TopicConfig& config,
                                 Word2TopicHistory* history = nullptr,
                                 const EpochCallback& on_epoch = {});

/// Forward passes over every vocabulary word. When labels is given, its
/// support is attached to the table.
EmbeddingTable export_table(Word2TopicModel& model, const Vocabulary& vocab,
                            const TopicIndex& topics, const LabelMatrix* labels = nullptr);

double word_topic_score(const EmbeddingTable& table, std::string_view word,
                        std::string_view topic);

}  // namespace topicsent
