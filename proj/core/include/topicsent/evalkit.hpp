#pragma once

#include <cstddef>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

namespace topicsent {

/// k x k counts; rows are gold classes, columns predicted classes.
struct ConfusionMatrix {
  std::size_t k = 0;
  std::vector<std::uint64_t> counts;
  std::vector<std::string> class_names;

  std::uint64_t at(std::size_t gold, std::size_t pred) const { return counts[gold * k + pred]; }
  std::uint64_t total() const;
  std::uint64_t trace() const;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;  // gold count
};

struct Metrics {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<ClassMetrics> per_class;
};

/// Default display names: negative/neutral/positive for 3 classes, the raw
/// scores -2..+2 for 5.
std::vector<std::string> sentiment_class_names(int num_classes);

ConfusionMatrix confusion(std::span<const int> golds, std::span<const int> preds, std::size_t k,
                          std::vector<std::string> class_names = {});

/// Accuracy, per-class precision/recall/F1 (0/0 counts as 0) and their
/// unweighted macro-F1. Throws on an empty matrix.
Metrics metrics(const ConfusionMatrix& cm);

/// Header row `gold\pred,<names...>` then one row per gold class.
std::string to_csv(const ConfusionMatrix& cm);
nlohmann::ordered_json to_json(const ConfusionMatrix& cm, const Metrics& m);

}  // namespace topicsent
