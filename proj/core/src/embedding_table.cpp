#include "topicsent/embedding_table.hpp"

#include <algorithm>

#include "topicsent/rng.hpp"
#include "topicsent/textio.hpp"

namespace topicsent {

EmbeddingTable::EmbeddingTable(Vocabulary vocab, Tensor embeddings)
    : vocab_(std::move(vocab)), embeddings_(std::move(embeddings)) {
  if (embeddings_.rank() != 2 || embeddings_.rows() != vocab_.size()) {
    throw ShapeError("embedding matrix must be [vocab size, dim]");
  }
  zeros_.assign(embeddings_.cols(), 0.0);
}

EmbeddingTable::EmbeddingTable(Vocabulary vocab, Tensor embeddings, TopicIndex topics,
                               Tensor scores)
    : EmbeddingTable(std::move(vocab), std::move(embeddings)) {
  topics_ = std::move(topics);
  scores_ = std::move(scores);
  if (scores_.rank() != 2 || scores_.rows() != vocab_.size() || scores_.cols() != topics_.size()) {
    throw ShapeError("score matrix must be [vocab size, topic count]");
  }
  zeros_.assign(std::max(embeddings_.cols(), scores_.cols()), 0.0);
}

std::span<const double> EmbeddingTable::embedding(int word_id) const {
  if (word_id == kPadId) return {zeros_.data(), dim()};
  if (word_id < 0 || static_cast<std::size_t>(word_id) >= words()) {
    throw std::out_of_range("word id " + std::to_string(word_id) + " out of range");
  }
  return embeddings_.row(static_cast<std::size_t>(word_id));
}

std::span<const double> EmbeddingTable::scores(int word_id) const {
  if (!has_scores()) throw std::logic_error("embedding table has no topic scores");
  if (word_id == kPadId) return {zeros_.data(), scores_.cols()};
  if (word_id < 0 || static_cast<std::size_t>(word_id) >= words()) {
    throw std::out_of_range("word id " + std::to_string(word_id) + " out of range");
  }
  return scores_.row(static_cast<std::size_t>(word_id));
}

int EmbeddingTable::word_id(std::string_view word) const {
  if (word == kPadToken) return kPadId;
  auto id = vocab_.find(word);
  if (!id) throw UnknownWordError(std::string(word));
  return *id;
}

int EmbeddingTable::topic_id(std::string_view topic) const {
  auto id = topics_.find(topic);
  if (!id) throw UnknownTopicError(std::string(topic));
  return *id;
}

double EmbeddingTable::score(std::string_view word, std::string_view topic) const {
  const int w = word_id(word);
  const int a = topic_id(topic);
  return scores(w)[static_cast<std::size_t>(a)];
}

void EmbeddingTable::set_support(std::vector<std::uint32_t> support) {
  if (support.size() != words() * topics_.size()) {
    throw ShapeError("support must have one count per (word, topic) cell");
  }
  support_ = std::move(support);
}

bool EmbeddingTable::supported(int word_id, int topic_id) const {
  if (support_.empty()) return true;
  return support_[static_cast<std::size_t>(word_id) * topics_.size() +
                  static_cast<std::size_t>(topic_id)] > 0;
}

void EmbeddingTable::save(Checkpoint& ckpt) const {
  ckpt.put_table("vocab", vocab_);
  ckpt.set_config("vocab", {{"min_freq", vocab_.min_freq()}});
  ckpt.put_tensor("table.embeddings", embeddings_);
  if (has_scores()) {
    ckpt.put_table("topics", topics_);
    ckpt.put_tensor("table.scores", scores_);
  }
  if (has_support()) {
    Tensor s({words(), topics_.size()});
    for (std::size_t i = 0; i < support_.size(); ++i) s[i] = support_[i];
    ckpt.put_tensor("table.support", s);
  }
}

EmbeddingTable EmbeddingTable::load(const Checkpoint& ckpt) {
  std::size_t min_freq = 1;
  if (ckpt.has_config("vocab")) min_freq = ckpt.config("vocab").value("min_freq", std::size_t{1});
  Vocabulary vocab(ckpt.table("vocab"), min_freq);
  Tensor emb = ckpt.tensor("table.embeddings");
  if (!ckpt.has_tensor("table.scores")) return EmbeddingTable(std::move(vocab), std::move(emb));
  EmbeddingTable out(std::move(vocab), std::move(emb), TopicIndex(ckpt.table("topics")),
                     ckpt.tensor("table.scores"));
  if (ckpt.has_tensor("table.support")) {
    const Tensor s = ckpt.tensor("table.support");
    std::vector<std::uint32_t> support(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) support[i] = static_cast<std::uint32_t>(s[i]);
    out.set_support(std::move(support));
  }
  return out;
}

namespace {

std::string matrix_tsv(const Vocabulary& vocab, const Tensor& m) {
  std::string out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out += vocab.word(static_cast<int>(r));
    for (double v : m.row(r)) {
      out += '\t';
      out += textio::format_double(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace

std::string EmbeddingTable::embeddings_tsv() const { return matrix_tsv(vocab_, embeddings_); }

std::string EmbeddingTable::scores_tsv() const {
  if (!has_scores()) throw std::logic_error("embedding table has no topic scores");
  return matrix_tsv(vocab_, scores_);
}

EmbeddingTable EmbeddingTable::from_tsv(std::string_view content, const Vocabulary& vocab) {
  std::size_t dim = 0;
  std::vector<std::pair<int, std::vector<double>>> rows;
  std::size_t line_no = 0;
  for (std::string_view line : textio::split(content, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = textio::split(line, '\t');
    if (fields.size() < 2) {
      throw std::invalid_argument("embedding TSV line " + std::to_string(line_no) +
                                  ": expected a word and at least one value");
    }
    if (dim == 0) dim = fields.size() - 1;
    if (fields.size() - 1 != dim) {
      throw std::invalid_argument("embedding TSV line " + std::to_string(line_no) +
                                  ": inconsistent width");
    }
    auto id = vocab.find(fields[0]);
    if (!id) continue;
    std::vector<double> values;
    values.reserve(dim);
    for (std::size_t k = 1; k < fields.size(); ++k) values.push_back(textio::parse_double(fields[k]));
    rows.emplace_back(*id, std::move(values));
  }
  if (dim == 0) throw std::invalid_argument("embedding TSV has no rows");
  Tensor m = Tensor::matrix(vocab.size(), dim);
  for (const auto& [id, values] : rows) {
    std::copy(values.begin(), values.end(), m.row(static_cast<std::size_t>(id)).begin());
  }
  return EmbeddingTable(vocab, std::move(m));
}

EmbeddingTable EmbeddingTable::random(const Vocabulary& vocab, std::size_t dim,
                                      std::uint64_t seed) {
  Rng rng(seed);
  Tensor m = Tensor::matrix(vocab.size(), dim);
  for (double& v : m.values()) v = rng.uniform(-1.0, 1.0);
  return EmbeddingTable(vocab, std::move(m));
}

}  // namespace topicsent
