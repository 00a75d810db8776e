#include "topicsent/evalkit.hpp"

#include <numeric>
#include <stdexcept>

namespace topicsent {

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < k; ++i) s += at(i, i);
  return s;
}

std::vector<std::string> sentiment_class_names(int num_classes) {
  if (num_classes == 3) return {"negative", "neutral", "positive"};
  if (num_classes == 5) return {"-2", "-1", "0", "+1", "+2"};
  std::vector<std::string> out;
  for (int i = 0; i < num_classes; ++i) out.push_back(std::to_string(i));
  return out;
}

ConfusionMatrix confusion(std::span<const int> golds, std::span<const int> preds, std::size_t k,
                          std::vector<std::string> class_names) {
  if (golds.size() != preds.size()) {
    throw std::invalid_argument("confusion: " + std::to_string(golds.size()) + " golds but " +
                                std::to_string(preds.size()) + " predictions");
  }
  if (class_names.empty()) class_names = sentiment_class_names(static_cast<int>(k));
  if (class_names.size() != k) throw std::invalid_argument("confusion: class name count differs from k");
  ConfusionMatrix cm{k, std::vector<std::uint64_t>(k * k, 0), std::move(class_names)};
  for (std::size_t i = 0; i < golds.size(); ++i) {
    const int g = golds[i], p = preds[i];
    if (g < 0 || p < 0 || static_cast<std::size_t>(g) >= k || static_cast<std::size_t>(p) >= k) {
      throw std::out_of_range("confusion: class out of range at position " + std::to_string(i));
    }
    ++cm.counts[static_cast<std::size_t>(g) * k + static_cast<std::size_t>(p)];
  }
  return cm;
}

Metrics metrics(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) throw std::invalid_argument("metrics: empty confusion matrix");
  Metrics m;
  m.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
  double f1_sum = 0.0;
  for (std::size_t c = 0; c < cm.k; ++c) {
    std::uint64_t predicted = 0, gold = 0;
    for (std::size_t j = 0; j < cm.k; ++j) {
      predicted += cm.at(j, c);
      gold += cm.at(c, j);
    }
    const double tp = static_cast<double>(cm.at(c, c));
    ClassMetrics cls;
    cls.support = gold;
    cls.precision = predicted ? tp / static_cast<double>(predicted) : 0.0;
    cls.recall = gold ? tp / static_cast<double>(gold) : 0.0;
    const double denom = cls.precision + cls.recall;
    cls.f1 = denom > 0.0 ? 2.0 * cls.precision * cls.recall / denom : 0.0;
    f1_sum += cls.f1;
    m.per_class.push_back(cls);
  }
  m.macro_f1 = cm.k ? f1_sum / static_cast<double>(cm.k) : 0.0;
  return m;
}

std::string to_csv(const ConfusionMatrix& cm) {
  std::string out = "gold\\pred";
  for (const auto& name : cm.class_names) out += "," + name;
  out += '\n';
  for (std::size_t g = 0; g < cm.k; ++g) {
    out += cm.class_names[g];
    for (std::size_t p = 0; p < cm.k; ++p) out += "," + std::to_string(cm.at(g, p));
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json to_json(const ConfusionMatrix& cm, const Metrics& m) {
  nlohmann::ordered_json j;
  j["accuracy"] = m.accuracy;
  j["macro_f1"] = m.macro_f1;
  j["total"] = cm.total();
  j["classes"] = cm.class_names;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t g = 0; g < cm.k; ++g) {
    std::vector<std::uint64_t> row(cm.counts.begin() + static_cast<std::ptrdiff_t>(g * cm.k),
                                   cm.counts.begin() + static_cast<std::ptrdiff_t>((g + 1) * cm.k));
    rows.push_back(row);
  }
  j["confusion"] = rows;
  nlohmann::ordered_json per = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < m.per_class.size(); ++c) {
    per.push_back({{"class", cm.class_names[c]},
                   {"precision", m.per_class[c].precision},
                   {"recall", m.per_class[c].recall},
                   {"f1", m.per_class[c].f1},
                   {"support", m.per_class[c].support}});
  }
  j["per_class"] = per;
  return j;
}

}  // namespace topicsent
