#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "topicsent/autograd.hpp"
#include "topicsent/corpus.hpp"
#include "topicsent/embedding_table.hpp"
#include "topicsent/evalkit.hpp"

namespace topicsent {

/// pad_len embedding rows of the encoded tweet laid end to end (PAD rows are
/// zero), followed by a t-wide one-hot of the topic.
std::vector<double> featurize(std::span<const int> tweet_ids, int topic_id,
                              const EmbeddingTable& table, std::size_t topic_count);

struct LogRegConfig {
  std::size_t epochs = 100;
  double lr = 0.01;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
  std::size_t batch_size = 64;
};

/// Multinomial logistic regression: softmax(x W + b).
class LogisticModel {
 public:
  LogisticModel() = default;
  LogisticModel(std::size_t features, std::size_t classes);

  /// Mean cross-entropy over rows plus (l2 / 2) * ||W||^2.
  ag::Var loss(ag::Tape& tape, const Tensor& features, std::span<const int> labels, double l2);
  Tensor probabilities(const Tensor& features);
  std::vector<int> predict(const Tensor& features);

  std::vector<ag::Parameter*> parameters() { return {&weight_, &bias_}; }
  const Tensor& weight() const { return weight_.value; }
  const Tensor& bias() const { return bias_.value; }

 private:
  ag::Parameter weight_;
  ag::Parameter bias_;
};

/// Minibatch Adam from zero weights; batches are drawn in a seeded order.
/// Throws when fewer than two classes appear in labels.
LogisticModel train_logreg(const Tensor& features, std::span<const int> labels, int num_classes,
                           const LogRegConfig& config);

struct BaselineArm {
  std::string name;
  double accuracy = 0.0;
  double diagonal_mass = 0.0;  // trace / total of the test confusion matrix
  ConfusionMatrix confusion;
  Metrics metrics;
};

struct ComparisonReport {
  BaselineArm first;
  BaselineArm second;
  std::uint64_t split_seed = 0;
  std::uint64_t logreg_seed = 0;
  std::size_t pad_len = 30;
};

/// Trains one 3-class logistic model per table on the same train split and
/// featurization, and scores both on the test split.
ComparisonReport compare_embeddings(const EmbeddingTable& first, const std::string& first_name,
                                    const EmbeddingTable& second, const std::string& second_name,
                                    const SplitSet& splits, const TopicIndex& topics,
                                    const LogRegConfig& config, std::size_t pad_len = 30);

nlohmann::ordered_json to_json(const ComparisonReport& report);
/// report.json plus confusion_<arm>.csv for each arm.
void write_report(const ComparisonReport& report, const std::filesystem::path& dir);

}  // namespace topicsent
