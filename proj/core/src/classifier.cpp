#include "topicsent/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "topicsent/adam.hpp"
#include "topicsent/rng.hpp"
#include "topicsent/vocab.hpp"

namespace topicsent {

std::string to_string(TopicConcat mode) {
  return mode == TopicConcat::kPerTimestep ? "per_timestep" : "final_state";
}

TopicConcat parse_topic_concat(std::string_view text) {
  if (text == "per_timestep") return TopicConcat::kPerTimestep;
  if (text == "final_state") return TopicConcat::kFinalState;
  throw std::invalid_argument("unknown topic concat mode '" + std::string(text) +
                              "' (expected per_timestep or final_state)");
}

void ClassifierConfig::validate() const {
  if (num_classes != 3 && num_classes != 5) throw std::invalid_argument("num_classes must be 3 or 5");
  if (pad_len == 0 || embed_dim == 0 || sentence_hidden == 0 || topic_proj == 0 ||
      stack_hidden == 0) {
    throw std::invalid_argument("classifier widths must be positive");
  }
  if (!(lr > 0.0) || batch_size == 0) throw std::invalid_argument("lr and batch_size must be positive");
}

ClassifierModel::ClassifierModel(const ClassifierConfig& config) : config_(config) {
  config.validate();
  Rng rng(config.seed);
  const std::size_t sentence_out = 2 * config.sentence_hidden;
  const std::size_t stack_out = 2 * config.stack_hidden;
  const bool per_step = config.concat == TopicConcat::kPerTimestep;
  sentence_ = nn::BiLstm("classifier.sentence", config.embed_dim, config.sentence_hidden, rng);
  topic_ = nn::Dense("classifier.topic", config.embed_dim, config.topic_proj, rng);
  stack1_ = nn::BiLstm("classifier.stack1",
                       sentence_out + (per_step ? config.topic_proj : 0), config.stack_hidden, rng);
  stack2_ = nn::BiLstm("classifier.stack2", stack_out, config.stack_hidden, rng);
  output_ = nn::Dense("classifier.output", stack_out + (per_step ? 0 : config.topic_proj),
                      static_cast<std::size_t>(config.num_classes), rng);
}

ag::Var ClassifierModel::logits(ag::Tape& tape, std::span<const int> ids,
                                const Tensor& topic_vecs, const EmbeddingTable& table) {
  const std::size_t pad = config_.pad_len;
  const std::size_t dim = config_.embed_dim;
  if (ids.empty() || ids.size() % pad != 0) {
    throw ShapeError("classifier: ids must hold batch * pad_len entries");
  }
  const std::size_t batch = ids.size() / pad;
  if (topic_vecs.rank() != 2 || topic_vecs.rows() != batch || topic_vecs.cols() != dim) {
    throw ShapeError("classifier: topic vectors must be [batch, embed_dim]");
  }
  if (table.dim() != dim) {
    throw ShapeError("classifier: table width " + std::to_string(table.dim()) +
                     " differs from embed_dim " + std::to_string(dim));
  }

  std::vector<ag::Var> steps;
  steps.reserve(pad);
  for (std::size_t t = 0; t < pad; ++t) {
    Tensor x = Tensor::matrix(batch, dim);
    for (std::size_t b = 0; b < batch; ++b) {
      const auto row = table.embedding(ids[b * pad + t]);
      std::copy(row.begin(), row.end(), x.row(b).begin());
    }
    steps.push_back(tape.constant(std::move(x)));
  }

  std::vector<ag::Var> sentence = sentence_.run(tape, steps).concat();
  ag::Var topic = ag::relu(topic_(tape, tape.constant(topic_vecs)));

  ag::Var final_state;
  if (config_.concat == TopicConcat::kPerTimestep) {
    for (auto& s : sentence) {
      const ag::Var parts[] = {s, topic};
      s = ag::concat_cols(parts);
    }
    auto layer1 = stack1_.run(tape, sentence).concat();
    final_state = stack2_.run(tape, layer1).final_state();
  } else {
    auto layer1 = stack1_.run(tape, sentence).concat();
    const ag::Var parts[] = {stack2_.run(tape, layer1).final_state(), topic};
    final_state = ag::concat_cols(parts);
  }
  return output_(tape, final_state);
}

std::vector<ag::Parameter*> ClassifierModel::parameters() {
  std::vector<ag::Parameter*> out;
  auto append = [&](std::vector<ag::Parameter*> ps) { out.insert(out.end(), ps.begin(), ps.end()); };
  append(sentence_.parameters());
  append(topic_.parameters());
  append(stack1_.parameters());
  append(stack2_.parameters());
  append(output_.parameters());
  return out;
}

std::vector<Tensor> ClassifierModel::snapshot() {
  std::vector<Tensor> out;
  for (auto* p : parameters()) out.push_back(p->value);
  return out;
}

void ClassifierModel::restore(const std::vector<Tensor>& values) {
  auto params = parameters();
  if (values.size() != params.size()) throw std::invalid_argument("restore: parameter count differs");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (values[i].shape() != params[i]->value.shape()) throw ShapeError("restore: shape differs");
    params[i]->value = values[i];
    params[i]->zero_grad();
  }
}

void ClassifierModel::save(Checkpoint& ckpt) const {
  const auto& c = config_;
  ckpt.set_config("classifier", {{"num_classes", c.num_classes},
                                 {"pad_len", c.pad_len},
                                 {"embed_dim", c.embed_dim},
                                 {"sentence_hidden", c.sentence_hidden},
                                 {"topic_proj", c.topic_proj},
                                 {"stack_hidden", c.stack_hidden},
                                 {"lr", c.lr},
                                 {"batch_size", c.batch_size},
                                 {"epochs", c.epochs},
                                 {"seed", c.seed},
                                 {"concat", to_string(c.concat)}});
  for (auto* p : const_cast<ClassifierModel*>(this)->parameters()) {
    ckpt.put_tensor(p->name, p->value);
  }
}

ClassifierModel ClassifierModel::load(const Checkpoint& ckpt) {
  const auto& j = ckpt.config("classifier");
  ClassifierConfig c;
  c.num_classes = j.at("num_classes").get<int>();
  c.pad_len = j.at("pad_len").get<std::size_t>();
  c.embed_dim = j.at("embed_dim").get<std::size_t>();
  c.sentence_hidden = j.at("sentence_hidden").get<std::size_t>();
  c.topic_proj = j.at("topic_proj").get<std::size_t>();
  c.stack_hidden = j.at("stack_hidden").get<std::size_t>();
  c.lr = j.at("lr").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.concat = parse_topic_concat(j.at("concat").get<std::string>());
  ClassifierModel model(c);
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

std::vector<double> topic_vector(std::string_view topic, const EmbeddingTable& table) {
  std::vector<double> out(table.dim(), 0.0);
  std::size_t known = 0;
  for (const auto& tok : clean_tweet(topic)) {
    auto id = table.vocab().find(tok);
    if (!id) continue;
    const auto row = table.embedding(*id);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += row[k];
    ++known;
  }
  if (known > 1) {
    for (double& v : out) v /= static_cast<double>(known);
  }
  return out;
}

std::vector<double> forward(std::span<const int> tweet_ids, std::span<const double> topic_vec,
                            ClassifierModel& model, const EmbeddingTable& table) {
  if (tweet_ids.size() != model.config().pad_len) {
    throw ShapeError("forward: expected " + std::to_string(model.config().pad_len) +
                     " ids, got " + std::to_string(tweet_ids.size()));
  }
  if (topic_vec.size() != model.config().embed_dim) {
    throw ShapeError("forward: topic vector width differs from embed_dim");
  }
  Tensor topics({1, topic_vec.size()}, std::vector<double>(topic_vec.begin(), topic_vec.end()));
  ag::Tape tape;
  ag::Var z = model.logits(tape, tweet_ids, topics, table);
  return ag::softmax(z.value().row(0));
}

namespace {

int argmax(std::span<const double> values) {
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

}  // namespace

Prediction predict(std::string_view tweet_text, std::string_view topic, ClassifierModel& model,
                   const EmbeddingTable& table) {
  const auto tokens = clean_tweet(tweet_text);
  const auto ids = encode_tweet(tokens, table.vocab(), model.config().pad_len);
  Prediction out;
  out.probs = forward(ids, topic_vector(topic, table), model, table);
  out.label = argmax(out.probs);
  out.topic = std::string(topic);
  return out;
}

Tensor predict_all_topics(std::span<const int> tweet_ids, ClassifierModel& model,
                          const EmbeddingTable& table, const TopicIndex& topics) {
  const std::size_t k = static_cast<std::size_t>(model.config().num_classes);
  Tensor out = Tensor::matrix(topics.size(), k);
  for (std::size_t a = 0; a < topics.size(); ++a) {
    const auto probs =
        forward(tweet_ids, topic_vector(topics.topic(static_cast<int>(a)), table), model, table);
    std::copy(probs.begin(), probs.end(), out.row(a).begin());
  }
  return out;
}

EncodedSet encode_records(std::span<const TweetRecord> records, const EmbeddingTable& table,
                          const ClassifierConfig& config) {
  EncodedSet out;
  out.topic_vecs = Tensor::matrix(records.size(), table.dim());
  out.ids.reserve(records.size() * config.pad_len);
  std::map<std::string, std::vector<double>, std::less<>> cache;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const auto ids = encode_tweet(r.tokens, table.vocab(), config.pad_len);
    out.ids.insert(out.ids.end(), ids.begin(), ids.end());
    auto it = cache.find(r.topic);
    if (it == cache.end()) it = cache.emplace(r.topic, topic_vector(r.topic, table)).first;
    std::copy(it->second.begin(), it->second.end(), out.topic_vecs.row(i).begin());
    out.labels.push_back(class_of(r.score, config.num_classes));
  }
  return out;
}

namespace {

struct Batch {
  std::vector<int> ids;
  Tensor topics;
  std::vector<int> labels;
};

Batch gather(const EncodedSet& set, std::span<const std::size_t> rows, std::size_t pad) {
  Batch b;
  b.topics = Tensor::matrix(rows.size(), set.topic_vecs.cols());
  b.ids.reserve(rows.size() * pad);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t r = rows[k];
    b.ids.insert(b.ids.end(), set.ids.begin() + static_cast<std::ptrdiff_t>(r * pad),
                 set.ids.begin() + static_cast<std::ptrdiff_t>((r + 1) * pad));
    const auto src = set.topic_vecs.row(r);
    std::copy(src.begin(), src.end(), b.topics.row(k).begin());
    b.labels.push_back(set.labels[r]);
  }
  return b;
}

double mean_loss(const EncodedSet& set, ClassifierModel& model, const EmbeddingTable& table,
                 std::size_t batch_size) {
  std::vector<std::size_t> rows(set.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  double total = 0.0;
  const std::size_t pad = model.config().pad_len;
  for (std::size_t start = 0; start < rows.size(); start += batch_size) {
    const std::size_t len = std::min(batch_size, rows.size() - start);
    Batch b = gather(set, std::span<const std::size_t>(rows.data() + start, len), pad);
    ag::Tape tape;
    ag::Var loss = ag::softmax_cross_entropy(model.logits(tape, b.ids, b.topics, table), b.labels);
    total += loss.value()[0] * static_cast<double>(len);
  }
  return total / static_cast<double>(rows.size());
}

}  // namespace

std::vector<int> predict_labels(const EncodedSet& set, ClassifierModel& model,
                                const EmbeddingTable& table, std::size_t batch_size) {
  std::vector<int> out;
  out.reserve(set.size());
  std::vector<std::size_t> rows(set.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const std::size_t pad = model.config().pad_len;
  for (std::size_t start = 0; start < rows.size(); start += batch_size) {
    const std::size_t len = std::min(batch_size, rows.size() - start);
    Batch b = gather(set, std::span<const std::size_t>(rows.data() + start, len), pad);
    ag::Tape tape;
    const Tensor& z = model.logits(tape, b.ids, b.topics, table).value();
    for (std::size_t r = 0; r < len; ++r) out.push_back(argmax(z.row(r)));
  }
  return out;
}

ClassifierModel train_classifier(const SplitSet& splits, const EmbeddingTable& table,
                                 const ClassifierConfig& config, ClassifierHistory* history,
                                 const std::function<void(std::size_t, double, double)>& on_epoch) {
  config.validate();
  if (splits.train.empty()) throw std::invalid_argument("train_classifier: empty training split");
  ClassifierModel model(config);
  ClassifierHistory local;
  ClassifierHistory& hist = history ? *history : local;
  hist = ClassifierHistory{};
  if (config.epochs == 0) return model;

  const EncodedSet train = encode_records(splits.train, table, config);
  const EncodedSet val = encode_records(splits.validation, table, config);
  hist.initial_loss = mean_loss(train, model, table, config.batch_size);

  Adam optimizer(model.parameters(), AdamHyper{.lr = config.lr});
  Rng rng(Rng::derive(config.seed, 2));
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<Tensor> best;
  double best_acc = -1.0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    std::size_t batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      ++batch_no;
      const std::size_t len = std::min(config.batch_size, order.size() - start);
      Batch b = gather(train, std::span<const std::size_t>(order.data() + start, len),
                       config.pad_len);
      try {
        ag::Tape tape;
        ag::Var loss =
            ag::softmax_cross_entropy(model.logits(tape, b.ids, b.topics, table), b.labels);
        total += loss.value()[0] * static_cast<double>(len);
        tape.backward(loss);
        optimizer.step();
      } catch (const ag::NumericError& e) {
        throw ag::NumericError("classifier training diverged at epoch " + std::to_string(epoch) +
                               ", batch " + std::to_string(batch_no) + ": " + e.what());
      }
    }
    const double epoch_loss = total / static_cast<double>(order.size());
    if (!std::isfinite(epoch_loss)) {
      throw ag::NumericError("classifier training diverged at epoch " + std::to_string(epoch));
    }
    double acc = 0.0;
    if (val.size() > 0) {
      const auto preds = predict_labels(val, model, table, config.batch_size);
      std::size_t hits = 0;
      for (std::size_t i = 0; i < preds.size(); ++i) hits += preds[i] == val.labels[i];
      acc = static_cast<double>(hits) / static_cast<double>(val.size());
    }
    hist.train_loss.push_back(epoch_loss);
    hist.val_accuracy.push_back(acc);
    if (val.size() == 0 || acc > best_acc) {
      best_acc = acc;
      best = model.snapshot();
      hist.best_epoch = epoch;
    }
    if (on_epoch) on_epoch(epoch, epoch_loss, acc);
  }
  model.restore(best);
  return model;
}

}  // namespace topicsent
