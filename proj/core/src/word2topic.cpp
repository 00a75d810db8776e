#include "topicsent/word2topic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "topicsent/adam.hpp"
#include "topicsent/rng.hpp"

namespace topicsent {

std::string to_string(Word2TopicArch arch) {
  return arch == Word2TopicArch::kConv ? "conv" : "dense";
}

Word2TopicArch parse_word2topic_arch(std::string_view text) {
  if (text == "conv") return Word2TopicArch::kConv;
  if (text == "dense") return Word2TopicArch::kDense;
  throw std::invalid_argument("unknown word2topic arch '" + std::string(text) +
                              "' (expected conv or dense)");
}

Word2TopicModel::Word2TopicModel(std::size_t words, std::size_t topics,
                                 const Word2TopicConfig& config)
    : words_(words), topics_(topics), config_(config) {
  if (words == 0 || topics == 0) throw std::invalid_argument("word2topic: empty label matrix");
  Rng rng(config.seed);
  std::size_t features = 0;
  if (config.arch == Word2TopicArch::kConv) {
    conv_width_ = std::max<std::size_t>(1, std::min(config.conv_width, (words - 1) / 2 + 1));
    conv1_ = nn::Conv1d("word2topic.conv1", 1, config.conv1_filters, conv_width_, rng);
    conv2_ = nn::Conv1d("word2topic.conv2", config.conv1_filters, config.conv2_filters,
                        conv_width_, rng);
    features = (words - 2 * (conv_width_ - 1)) * config.conv2_filters;
  } else {
    if (config.dense_widths.empty()) throw std::invalid_argument("word2topic: no dense widths");
    const std::size_t first = config.dense_widths.front();
    input_weight_ = ag::Parameter("word2topic.input.weight",
                                  nn::glorot_uniform({words, first}, words, first, rng));
    input_bias_ = ag::Parameter("word2topic.input.bias", Tensor({first}));
    for (std::size_t k = 1; k < config.dense_widths.size(); ++k) {
      dense_.emplace_back("word2topic.hidden" + std::to_string(k), config.dense_widths[k - 1],
                          config.dense_widths[k], rng);
    }
    features = config.dense_widths.back();
  }
  embed_ = nn::Dense("word2topic.embed", features, config.embed_dim, rng);
  output_ = nn::Dense("word2topic.output", config.embed_dim, topics, rng);
}

Word2TopicModel::Output Word2TopicModel::forward(ag::Tape& tape, std::span<const int> word_ids) {
  const std::size_t batch = word_ids.size();
  for (int id : word_ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= words_) {
      throw std::out_of_range("word2topic: word id out of range");
    }
  }
  ag::Var features;
  if (config_.arch == Word2TopicArch::kConv) {
    Tensor onehot({batch, words_, 1});
    for (std::size_t b = 0; b < batch; ++b) {
      onehot[b * words_ + static_cast<std::size_t>(word_ids[b])] = 1.0;
    }
    ag::Var x = tape.constant(std::move(onehot));
    x = ag::relu(conv1_(tape, x));
    x = ag::relu(conv2_(tape, x));
    const std::size_t flat = x.value().size() / batch;
    features = ag::reshape(x, {batch, flat});
  } else {
    ag::Var x = ag::add_row(ag::gather_rows(tape.parameter(input_weight_), word_ids),
                            tape.parameter(input_bias_));
    x = ag::relu(x);
    for (auto& layer : dense_) x = ag::relu(layer(tape, x));
    features = x;
  }
  ag::Var embedding = embed_(tape, features);
  return {embedding, output_(tape, embedding)};
}

std::vector<ag::Parameter*> Word2TopicModel::parameters() {
  std::vector<ag::Parameter*> out;
  auto append = [&](std::vector<ag::Parameter*> ps) { out.insert(out.end(), ps.begin(), ps.end()); };
  if (config_.arch == Word2TopicArch::kConv) {
    append(conv1_.parameters());
    append(conv2_.parameters());
  } else {
    out.push_back(&input_weight_);
    out.push_back(&input_bias_);
    for (auto& layer : dense_) append(layer.parameters());
  }
  append(embed_.parameters());
  append(output_.parameters());
  return out;
}

void Word2TopicModel::save(Checkpoint& ckpt) const {
  ckpt.set_config("word2topic", {{"arch", to_string(config_.arch)},
                                 {"words", words_},
                                 {"topics", topics_},
                                 {"embed_dim", config_.embed_dim},
                                 {"conv_width", config_.conv_width},
                                 {"conv1_filters", config_.conv1_filters},
                                 {"conv2_filters", config_.conv2_filters},
                                 {"dense_widths", config_.dense_widths},
                                 {"epochs", config_.epochs},
                                 {"lr", config_.lr},
                                 {"batch_size", config_.batch_size},
                                 {"seed", config_.seed}});
  for (auto* p : const_cast<Word2TopicModel*>(this)->parameters()) ckpt.put_tensor(p->name, p->value);
}

Word2TopicModel Word2TopicModel::load(const Checkpoint& ckpt) {
  const auto& c = ckpt.config("word2topic");
  Word2TopicConfig config;
  config.arch = parse_word2topic_arch(c.at("arch").get<std::string>());
  config.embed_dim = c.at("embed_dim").get<std::size_t>();
  config.conv_width = c.at("conv_width").get<std::size_t>();
  config.conv1_filters = c.at("conv1_filters").get<std::size_t>();
  config.conv2_filters = c.at("conv2_filters").get<std::size_t>();
  config.dense_widths = c.at("dense_widths").get<std::vector<std::size_t>>();
  config.epochs = c.at("epochs").get<std::size_t>();
  config.lr = c.at("lr").get<double>();
  config.batch_size = c.at("batch_size").get<std::size_t>();
  config.seed = c.at("seed").get<std::uint64_t>();
  Word2TopicModel model(c.at("words").get<std::size_t>(), c.at("topics").get<std::size_t>(),
                        config);
  for (auto* p : model.parameters()) {
    Tensor v = ckpt.tensor(p->name);
    if (v.shape() != p->value.shape()) {
      throw CheckpointError("tensor '" + p->name + "' has shape " + shape_string(v.shape()) +
                            ", expected " + shape_string(p->value.shape()));
    }
    p->value = std::move(v);
    p->zero_grad();
  }
  return model;
}

Word2TopicModel train_word2topic(const LabelMatrix& labels, const Word2TopicConfig& config,
                                 Word2TopicHistory* history, const EpochCallback& on_epoch) {
  const std::size_t n = labels.words();
  const std::size_t t = labels.topics();
  if (n == 0 || t == 0) throw std::invalid_argument("train_word2topic: empty label matrix");
  if (config.batch_size == 0 || !(config.lr >= 0.0)) {
    throw std::invalid_argument("train_word2topic: batch_size must be positive and lr >= 0");
  }
  Word2TopicModel model(n, t, config);
  Adam optimizer(model.parameters(), AdamHyper{.lr = config.lr});
  Rng rng(Rng::derive(config.seed, 1));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> word_error(n);
  if (history) history->loss.clear();

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(std::span<int>(order));
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, n - start);
      const std::span<const int> ids(order.data() + start, len);
      Tensor target = Tensor::matrix(len, t);
      for (std::size_t b = 0; b < len; ++b) {
        const auto src = labels.values.row(static_cast<std::size_t>(ids[b]));
        std::copy(src.begin(), src.end(), target.row(b).begin());
      }
      ag::Tape tape;
      ag::Var loss;
      try {
        auto out = model.forward(tape, ids);
        loss = ag::mse(out.scores, target);
        const Tensor& pred = out.scores.value();
        for (std::size_t b = 0; b < len; ++b) {
          double err = 0.0;
          for (std::size_t a = 0; a < t; ++a) {
            const double d = pred.at(b, a) - target.at(b, a);
            err += d * d;
          }
          word_error[static_cast<std::size_t>(ids[b])] = err;
        }
        tape.backward(loss);
        optimizer.step();
      } catch (const ag::NumericError& e) {
        throw ag::NumericError("word2topic training diverged at epoch " + std::to_string(epoch) +
                               ": " + e.what());
      }
    }
    double total = 0.0;
    for (double e : word_error) total += e;
    const double epoch_loss = total / static_cast<double>(n * t);
    if (!std::isfinite(epoch_loss)) {
      throw ag::NumericError("word2topic training diverged at epoch " + std::to_string(epoch));
    }
    if (history) history->loss.push_back(epoch_loss);
    if (on_epoch) on_epoch(epoch, epoch_loss);
  }
  return model;
}

EmbeddingTable export_table(Word2TopicModel& model, const Vocabulary& vocab,
                            const TopicIndex& topics, const LabelMatrix* labels) {
  if (model.words() != vocab.size()) {
    throw std::invalid_argument("export_table: model covers " + std::to_string(model.words()) +
                                " words but the vocabulary has " + std::to_string(vocab.size()));
  }
  if (model.topics() != topics.size()) {
    throw std::invalid_argument("export_table: topic count mismatch");
  }
  const std::size_t n = vocab.size();
  Tensor emb = Tensor::matrix(n, model.embed_dim());
  Tensor scores = Tensor::matrix(n, model.topics());
  // One word per forward pass, so every row is exactly what a fresh
  // single-word query produces.
  for (std::size_t w = 0; w < n; ++w) {
    const int id = static_cast<int>(w);
    ag::Tape tape;
    auto out = model.forward(tape, std::span<const int>(&id, 1));
    std::copy_n(out.embedding.value().data(), model.embed_dim(), emb.row(w).data());
    std::copy_n(out.scores.value().data(), model.topics(), scores.row(w).data());
  }
  EmbeddingTable table(vocab, std::move(emb), topics, std::move(scores));
  if (labels) table.set_support(labels->support);
  return table;
}

double word_topic_score(const EmbeddingTable& table, std::string_view word,
                        std::string_view topic) {
  return table.score(word, topic);
}

}  // namespace topicsent
