#include "topicsent/insight.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "topicsent/textio.hpp"

namespace topicsent {

std::string to_string(Polarity p) { return p == Polarity::kPositive ? "positive" : "negative"; }

Polarity parse_polarity(std::string_view text) {
  if (text == "positive") return Polarity::kPositive;
  if (text == "negative") return Polarity::kNegative;
  throw std::invalid_argument("sign must be positive or negative, got '" + std::string(text) + "'");
}

std::vector<double> WordGrid::flatten() const {
  std::vector<double> out;
  for (const auto& v : values) {
    if (v) out.push_back(*v);
  }
  return out;
}

std::pair<std::size_t, std::size_t> default_grid_shape(std::size_t topics) {
  if (topics == 0) return {0, 0};
  std::size_t best = 1;
  for (std::size_t c = 1; c * c <= topics; ++c) {
    if (topics % c == 0) best = c;
  }
  if (best > 1 || topics <= 3) return {topics / best, best};
  const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(topics))));
  return {(topics + cols - 1) / cols, cols};
}

WordGrid word_grid(const EmbeddingTable& table, std::string_view word, std::size_t rows,
                   std::size_t cols) {
  const std::size_t t = table.topics().size();
  if (rows * cols < t) {
    throw std::invalid_argument("word_grid: " + std::to_string(rows) + "x" + std::to_string(cols) +
                                " grid cannot hold " + std::to_string(t) + " topics");
  }
  const auto scores = table.scores(table.word_id(word));
  WordGrid grid{std::string(word), rows, cols, {}, {}};
  grid.values.resize(rows * cols);
  grid.topics.resize(rows * cols);
  for (std::size_t a = 0; a < t; ++a) {
    grid.values[a] = scores[a];
    grid.topics[a] = table.topics().topic(static_cast<int>(a));
  }
  return grid;
}

std::vector<RankedWord> top_words(const EmbeddingTable& table, std::string_view topic,
                                  std::size_t k, Polarity sign, bool include_unsupported) {
  if (k == 0) throw std::invalid_argument("top_words: k must be >= 1");
  const int a = table.topic_id(topic);
  std::vector<RankedWord> ranked;
  for (std::size_t w = 0; w < table.words(); ++w) {
    const int id = static_cast<int>(w);
    if (!include_unsupported && !table.supported(id, a)) continue;
    ranked.push_back({table.vocab().word(id), table.scores(id)[static_cast<std::size_t>(a)]});
  }
  auto better = [sign](const RankedWord& x, const RankedWord& y) {
    if (x.score != y.score) return sign == Polarity::kPositive ? x.score > y.score : x.score < y.score;
    return x.word < y.word;
  };
  const std::size_t keep = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                    ranked.end(), better);
  ranked.resize(keep);
  return ranked;
}

std::string grid_csv(const WordGrid& grid) {
  std::string out;
  for (std::size_t r = 0; r < grid.rows; ++r) {
    for (std::size_t c = 0; c < grid.cols; ++c) {
      if (c) out += ',';
      const auto& v = grid.values[r * grid.cols + c];
      if (v) out += textio::format_double(*v);
    }
    out += '\n';
  }
  return out;
}

WordGrid parse_grid_csv(std::string_view content) {
  WordGrid grid;
  for (std::string_view line : textio::split(content, '\n')) {
    if (line.empty()) continue;
    const auto cells = textio::split(line, ',');
    if (grid.rows == 0) grid.cols = cells.size();
    if (cells.size() != grid.cols) throw std::invalid_argument("grid CSV rows differ in width");
    for (auto cell : cells) {
      grid.values.push_back(cell.empty() ? std::nullopt
                                         : std::optional<double>(textio::parse_double(cell)));
    }
    ++grid.rows;
  }
  grid.topics.resize(grid.values.size());
  return grid;
}

std::string top_words_csv(std::span<const RankedWord> ranked) {
  std::string out = "rank,word,score\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    out += std::to_string(i + 1) + "," + ranked[i].word + "," +
           textio::format_double(ranked[i].score) + "\n";
  }
  return out;
}

namespace {

std::string slug(std::string_view text) {
  std::string out;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      out.push_back(static_cast<char>(std::tolower(c)));
    } else if (out.empty() || out.back() != '_') {
      out.push_back('_');
    }
  }
  return out.empty() ? "_" : out;
}

}  // namespace

void export_report(const EmbeddingTable& table, std::span<const std::string> words,
                   std::span<const std::string> topics, const std::filesystem::path& dir,
                   const ReportOptions& options) {
  if (words.empty()) throw std::invalid_argument("export_report: empty word selection");
  if (topics.empty()) throw std::invalid_argument("export_report: empty topic selection");
  auto [rows, cols] = default_grid_shape(table.topics().size());
  if (options.rows || options.cols) {
    rows = options.rows;
    cols = options.cols;
  }

  nlohmann::ordered_json index;
  index["rows"] = rows;
  index["cols"] = cols;
  nlohmann::ordered_json names = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < rows; ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t a = r * cols + c;
      row.push_back(a < table.topics().size() ? nlohmann::ordered_json(table.topics().topic(static_cast<int>(a)))
                                              : nlohmann::ordered_json(nullptr));
    }
    names.push_back(std::move(row));
  }
  index["topic_grid"] = std::move(names);

  nlohmann::ordered_json grids = nlohmann::ordered_json::array();
  for (const auto& word : words) {
    const WordGrid grid = word_grid(table, word, rows, cols);
    const std::string file = "grids/" + slug(word) + ".csv";
    textio::write_file(dir / file, grid_csv(grid));
    grids.push_back({{"word", word}, {"file", file}});
  }
  index["grids"] = std::move(grids);

  nlohmann::ordered_json lists = nlohmann::ordered_json::array();
  for (const auto& topic : topics) {
    const int a = table.topic_id(topic);
    for (Polarity sign : {Polarity::kPositive, Polarity::kNegative}) {
      const auto ranked = top_words(table, topic, options.k, sign, options.include_unsupported);
      const std::string file =
          "top/" + std::to_string(a) + "_" + slug(topic) + "_" + to_string(sign) + ".csv";
      textio::write_file(dir / file, top_words_csv(ranked));
      lists.push_back({{"topic", topic}, {"sign", to_string(sign)}, {"k", options.k}, {"file", file}});
    }
  }
  index["top_words"] = std::move(lists);
  textio::write_file(dir / "index.json", index.dump(2) + "\n");
}

}  // namespace topicsent
