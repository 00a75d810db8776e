#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "topicsent/embedding_table.hpp"

namespace topicsent {

enum class Polarity { kPositive, kNegative };

std::string to_string(Polarity p);
Polarity parse_polarity(std::string_view text);

/// A word's topic scores laid out row-major in topic-id order. Cells past
/// the last topic are absent.
struct WordGrid {
  std::string word;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::optional<double>> values;
  std::vector<std::optional<std::string>> topics;

  /// The present values in row-major order, i.e. the original t-vector.
  std::vector<double> flatten() const;
};

/// Grid dimensions for t topics: the most square exact factorization
/// (77 gives 11 x 7), or a ceil(sqrt(t))-wide grid when t has no divisor
/// pair better than t x 1.
std::pair<std::size_t, std::size_t> default_grid_shape(std::size_t topics);

WordGrid word_grid(const EmbeddingTable& table, std::string_view word, std::size_t rows,
                   std::size_t cols);

struct RankedWord {
  std::string word;
  double score = 0.0;

  friend bool operator==(const RankedWord&, const RankedWord&) = default;
};

/// Vocabulary ranked by the topic's score column: descending for positive,
/// ascending for negative, ties by word. Words without label support for
/// the topic are skipped unless include_unsupported is set. Returns at most
/// k entries.
std::vector<RankedWord> top_words(const EmbeddingTable& table, std::string_view topic,
                                  std::size_t k, Polarity sign, bool include_unsupported = false);

/// rows lines of cols comma-separated values; absent cells are empty.
std::string grid_csv(const WordGrid& grid);
/// Parses grid_csv output back into values (topics are not stored).
WordGrid parse_grid_csv(std::string_view content);

/// `rank,word,score` with rank starting at 1.
std::string top_words_csv(std::span<const RankedWord> ranked);

struct ReportOptions {
  std::size_t k = 10;
  std::size_t rows = 0;  // 0 picks default_grid_shape
  std::size_t cols = 0;
  bool include_unsupported = false;
};

/// Writes grids/<word>.csv per word, top/<topic>_{positive,negative}.csv
/// per topic, and index.json listing every file plus the topic-name grid.
void export_report(const EmbeddingTable& table, std::span<const std::string> words,
                   std::span<const std::string> topics, const std::filesystem::path& dir,
                   const ReportOptions& options = {});

}  // namespace topicsent
