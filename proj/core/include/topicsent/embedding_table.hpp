#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "topicsent/checkpoint.hpp"
#include "topicsent/tensor.hpp"
#include "topicsent/vocab.hpp"

namespace topicsent {

/// Spelling of the padding entry in string lookups.
inline constexpr std::string_view kPadToken = "<pad>";

class UnknownWordError : public std::out_of_range {
 public:
  explicit UnknownWordError(const std::string& word)
      : std::out_of_range("unknown word '" + word + "'") {}
};

class UnknownTopicError : public std::out_of_range {
 public:
  explicit UnknownTopicError(const std::string& topic)
      : std::out_of_range("unknown topic '" + topic + "'") {}
};

/// Per-word vectors aligned with a Vocabulary. Always carries an n x d
/// embedding matrix; a word2topic export additionally carries the n x t
/// topic-sentiment outputs and, when known, the label support that backed
/// each cell. kPadId looks up as all zeros.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(Vocabulary vocab, Tensor embeddings);
  EmbeddingTable(Vocabulary vocab, Tensor embeddings, TopicIndex topics, Tensor scores);

  const Vocabulary& vocab() const { return vocab_; }
  const TopicIndex& topics() const { return topics_; }
  std::size_t words() const { return vocab_.size(); }
  std::size_t dim() const { return embeddings_.cols(); }
  bool has_scores() const { return !scores_.empty(); }

  const Tensor& embedding_matrix() const { return embeddings_; }
  const Tensor& score_matrix() const { return scores_; }

  std::span<const double> embedding(int word_id) const;
  std::span<const double> scores(int word_id) const;

  /// Word id for a string; kPadToken maps to kPadId.
  int word_id(std::string_view word) const;
  int topic_id(std::string_view topic) const;

  /// Entry (word, topic) of the topic-sentiment matrix. Throws
  /// UnknownWordError or UnknownTopicError.
  double score(std::string_view word, std::string_view topic) const;

  void set_support(std::vector<std::uint32_t> support);
  bool has_support() const { return !support_.empty(); }
  /// True when the label matrix had at least one tweet behind the cell, or
  /// when no support information is attached.
  bool supported(int word_id, int topic_id) const;

  void save(Checkpoint& ckpt) const;
  static EmbeddingTable load(const Checkpoint& ckpt);

  /// `word<TAB>v1<TAB>...<TAB>vd` rows in id order.
  std::string embeddings_tsv() const;
  /// `word<TAB>s1<TAB>...<TAB>st` rows in id order.
  std::string scores_tsv() const;

  /// Reads `word<TAB>floats` rows and aligns them to vocab; vocabulary words
  /// absent from the file get zero rows. All rows must share one width.
  static EmbeddingTable from_tsv(std::string_view content, const Vocabulary& vocab);

  /// Seeded uniform(-1, 1) vectors; carries no information about sentiment.
  static EmbeddingTable random(const Vocabulary& vocab, std::size_t dim, std::uint64_t seed);

 private:
  Vocabulary vocab_;
  TopicIndex topics_;
  Tensor embeddings_;
  Tensor scores_;
  std::vector<std::uint32_t> support_;
  std::vector<double> zeros_;
};

}  // namespace topicsent
