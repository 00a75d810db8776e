#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topicsent/checkpoint.hpp"
#include "topicsent/corpus.hpp"
#include "topicsent/embedding_table.hpp"
#include "topicsent/nn.hpp"

namespace topicsent {

/// Where the topic block joins the sentence block.
enum class TopicConcat {
  kPerTimestep,  // topic projection appended to every sentence-block output step
  kFinalState,   // topic projection appended to the final stacked state only
};

std::string to_string(TopicConcat mode);
TopicConcat parse_topic_concat(std::string_view text);

struct ClassifierConfig {
  int num_classes = 3;
  std::size_t pad_len = 30;
  std::size_t embed_dim = 100;
  std::size_t sentence_hidden = 64;  // per direction
  std::size_t topic_proj = 64;
  std::size_t stack_hidden = 64;     // per direction, both stacked layers
  double lr = 0.0005;
  std::size_t batch_size = 64;
  std::size_t epochs = 40;
  std::uint64_t seed = 0;
  TopicConcat concat = TopicConcat::kPerTimestep;

  void validate() const;
};

/// Topic-conditioned BiLSTM classifier. The sentence block runs a BiLSTM
/// over pad_len embedded tokens; the topic block is ReLU(dense) over the
/// topic embedding; two further BiLSTM layers consume the joined sequence
/// and a softmax layer reads the final forward and backward states.
class ClassifierModel {
 public:
  ClassifierModel() = default;
  explicit ClassifierModel(const ClassifierConfig& config);

  /// ids: batch * pad_len word ids (row-major, kPadId for padding);
  /// topic_vecs: [batch, embed_dim]. Returns logits [batch, num_classes].
  ag::Var logits(ag::Tape& tape, std::span<const int> ids, const Tensor& topic_vecs,
                 const EmbeddingTable& table);

  std::vector<ag::Parameter*> parameters();
  const ClassifierConfig& config() const { return config_; }

  std::vector<Tensor> snapshot();
  void restore(const std::vector<Tensor>& values);

  void save(Checkpoint& ckpt) const;
  static ClassifierModel load(const Checkpoint& ckpt);

 private:
  ClassifierConfig config_;
  nn::BiLstm sentence_;
  nn::Dense topic_;
  nn::BiLstm stack1_;
  nn::BiLstm stack2_;
  nn::Dense output_;
};

struct Prediction {
  std::vector<double> probs;
  int label = 0;
  std::string topic;
};

/// Mean of the embeddings of the topic's in-vocabulary tokens (cleaned with
/// the tweet rules); zeros when none are known.
std::vector<double> topic_vector(std::string_view topic, const EmbeddingTable& table);

/// Class distribution for one encoded tweet (pad_len ids) and topic vector.
std::vector<double> forward(std::span<const int> tweet_ids, std::span<const double> topic_vec,
                            ClassifierModel& model, const EmbeddingTable& table);

/// Cleans and encodes raw tweet text, then classifies it against topic.
Prediction predict(std::string_view tweet_text, std::string_view topic, ClassifierModel& model,
                   const EmbeddingTable& table);

/// Row a is forward(tweet, topic_vector(topic a)); rows follow topic ids.
Tensor predict_all_topics(std::span<const int> tweet_ids, ClassifierModel& model,
                          const EmbeddingTable& table, const TopicIndex& topics);

struct ClassifierHistory {
  double initial_loss = 0.0;             // training loss before the first update
  std::vector<double> train_loss;        // mean over each epoch's minibatches
  std::vector<double> val_accuracy;
  std::size_t best_epoch = 0;            // 1-based; 0 means the initial model
};

struct EncodedSet {
  std::vector<int> ids;   // size * pad_len
  Tensor topic_vecs;      // [size, embed_dim]
  std::vector<int> labels;
  std::size_t size() const { return labels.size(); }
};

EncodedSet encode_records(std::span<const TweetRecord> records, const EmbeddingTable& table,
                          const ClassifierConfig& config);

/// Argmax labels for every row of an encoded set, batched.
std::vector<int> predict_labels(const EncodedSet& set, ClassifierModel& model,
                                const EmbeddingTable& table, std::size_t batch_size = 64);

/// Minibatch Adam on categorical cross-entropy. Returns the parameters from
/// the epoch with the best validation accuracy (earliest on ties; the last
/// epoch when there is no validation data).
ClassifierModel train_classifier(const SplitSet& splits, const EmbeddingTable& table,
                                 const ClassifierConfig& config,
                                 ClassifierHistory* history = nullptr,
                                 const std::function<void(std::size_t, double, double)>& on_epoch = {});

}  // namespace topicsent
