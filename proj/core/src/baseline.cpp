#include "topicsent/baseline.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "topicsent/adam.hpp"
#include "topicsent/rng.hpp"
#include "topicsent/textio.hpp"
#include "topicsent/vocab.hpp"

namespace topicsent {

std::vector<double> featurize(std::span<const int> tweet_ids, int topic_id,
                              const EmbeddingTable& table, std::size_t topic_count) {
  if (topic_id < 0 || static_cast<std::size_t>(topic_id) >= topic_count) {
    throw std::out_of_range("featurize: topic id " + std::to_string(topic_id) +
                            " outside [0, " + std::to_string(topic_count) + ")");
  }
  const std::size_t d = table.dim();
  std::vector<double> out(tweet_ids.size() * d + topic_count, 0.0);
  for (std::size_t p = 0; p < tweet_ids.size(); ++p) {
    const auto row = table.embedding(tweet_ids[p]);
    std::copy(row.begin(), row.end(), out.begin() + static_cast<std::ptrdiff_t>(p * d));
  }
  out[tweet_ids.size() * d + static_cast<std::size_t>(topic_id)] = 1.0;
  return out;
}

LogisticModel::LogisticModel(std::size_t features, std::size_t classes)
    : weight_("logreg.weight", Tensor::matrix(features, classes)),
      bias_("logreg.bias", Tensor({classes})) {}

ag::Var LogisticModel::loss(ag::Tape& tape, const Tensor& features, std::span<const int> labels,
                            double l2) {
  ag::Var w = tape.parameter(weight_);
  ag::Var z = ag::add_row(ag::matmul(tape.constant(features), w), tape.parameter(bias_));
  ag::Var ce = ag::softmax_cross_entropy(z, labels);
  if (l2 == 0.0) return ce;
  return ag::add(ce, ag::scale(ag::sum(ag::mul(w, w)), 0.5 * l2));
}

Tensor LogisticModel::probabilities(const Tensor& features) {
  ag::Tape tape;
  ag::Var z = ag::add_row(ag::matmul(tape.constant(features), tape.constant(weight_.value)),
                          tape.constant(bias_.value));
  return ag::softmax_rows(z.value());
}

std::vector<int> LogisticModel::predict(const Tensor& features) {
  const Tensor p = probabilities(features);
  std::vector<int> out;
  for (std::size_t r = 0; r < p.rows(); ++r) {
    const auto row = p.row(r);
    out.push_back(static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin()));
  }
  return out;
}

LogisticModel train_logreg(const Tensor& features, std::span<const int> labels, int num_classes,
                           const LogRegConfig& config) {
  if (features.rank() != 2 || features.rows() != labels.size()) {
    throw ShapeError("train_logreg: features must be [examples, dims] with one label per row");
  }
  if (std::set<int>(labels.begin(), labels.end()).size() < 2) {
    throw std::invalid_argument("train_logreg: training data contains a single class");
  }
  if (config.batch_size == 0) throw std::invalid_argument("train_logreg: batch_size must be positive");
  LogisticModel model(features.cols(), static_cast<std::size_t>(num_classes));
  Adam optimizer(model.parameters(), AdamHyper{.lr = config.lr});
  Rng rng(config.seed);
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t dims = features.cols();
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, order.size() - start);
      Tensor x = Tensor::matrix(len, dims);
      std::vector<int> y(len);
      for (std::size_t k = 0; k < len; ++k) {
        const auto src = features.row(order[start + k]);
        std::copy(src.begin(), src.end(), x.row(k).begin());
        y[k] = labels[order[start + k]];
      }
      ag::Tape tape;
      ag::Var loss = model.loss(tape, x, y, config.l2);
      tape.backward(loss);
      optimizer.step();
    }
  }
  return model;
}

namespace {

struct FeatureSet {
  Tensor x;
  std::vector<int> y;
};

FeatureSet build_features(std::span<const TweetRecord> records, const EmbeddingTable& table,
                          const TopicIndex& topics, std::size_t pad_len) {
  const std::size_t width = pad_len * table.dim() + topics.size();
  FeatureSet out{Tensor::matrix(records.size(), width), {}};
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    auto topic = topics.find(r.topic);
    if (!topic) throw UnknownTopicError(r.topic);
    const auto ids = encode_tweet(r.tokens, table.vocab(), pad_len);
    const auto f = featurize(ids, *topic, table, topics.size());
    std::copy(f.begin(), f.end(), out.x.row(i).begin());
    out.y.push_back(class_of(r.score, 3));
  }
  return out;
}

BaselineArm run_arm(const EmbeddingTable& table, const std::string& name, const SplitSet& splits,
                    const TopicIndex& topics, const LogRegConfig& config, std::size_t pad_len) {
  const FeatureSet train = build_features(splits.train, table, topics, pad_len);
  const FeatureSet test = build_features(splits.test, table, topics, pad_len);
  LogisticModel model = train_logreg(train.x, train.y, 3, config);
  BaselineArm arm;
  arm.name = name;
  const auto preds = test.y.empty() ? std::vector<int>{} : model.predict(test.x);
  arm.confusion = confusion(test.y, preds, 3);
  if (arm.confusion.total() > 0) {
    arm.metrics = metrics(arm.confusion);
    arm.accuracy = arm.metrics.accuracy;
    arm.diagonal_mass = arm.accuracy;
  }
  return arm;
}

}  // namespace

ComparisonReport compare_embeddings(const EmbeddingTable& first, const std::string& first_name,
                                    const EmbeddingTable& second, const std::string& second_name,
                                    const SplitSet& splits, const TopicIndex& topics,
                                    const LogRegConfig& config, std::size_t pad_len) {
  ComparisonReport report;
  report.split_seed = splits.seed;
  report.logreg_seed = config.seed;
  report.pad_len = pad_len;
  report.first = run_arm(first, first_name, splits, topics, config, pad_len);
  report.second = run_arm(second, second_name, splits, topics, config, pad_len);
  return report;
}

nlohmann::ordered_json to_json(const ComparisonReport& report) {
  nlohmann::ordered_json j;
  j["split_seed"] = report.split_seed;
  j["logreg_seed"] = report.logreg_seed;
  j["pad_len"] = report.pad_len;
  nlohmann::ordered_json arms = nlohmann::ordered_json::array();
  for (const BaselineArm* arm : {&report.first, &report.second}) {
    nlohmann::ordered_json a;
    a["name"] = arm->name;
    a["accuracy"] = arm->accuracy;
    a["diagonal_mass"] = arm->diagonal_mass;
    a["report"] = arm->confusion.total() > 0 ? to_json(arm->confusion, arm->metrics)
                                             : nlohmann::ordered_json();
    arms.push_back(std::move(a));
  }
  j["arms"] = arms;
  return j;
}

void write_report(const ComparisonReport& report, const std::filesystem::path& dir) {
  textio::write_file(dir / "report.json", to_json(report).dump(2) + "\n");
  for (const BaselineArm* arm : {&report.first, &report.second}) {
    textio::write_file(dir / ("confusion_" + arm->name + ".csv"), to_csv(arm->confusion));
  }
}

}  // namespace topicsent
