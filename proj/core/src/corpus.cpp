#include "topicsent/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <regex>
#include <sstream>

#include "topicsent/rng.hpp"
#include "topicsent/textio.hpp"

namespace topicsent {
namespace {

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

bool is_url(std::string_view token) {
  auto starts = [&](std::string_view prefix) {
    if (token.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(token[i])) != prefix[i]) return false;
    }
    return true;
  };
  return starts("http://") || starts("https://") || starts("www.");
}

std::string normalize_token(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  for (char ch : token) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80) continue;
    const char lower = static_cast<char>(std::tolower(c));
    if ((lower >= 'a' && lower <= 'z') || (lower >= '0' && lower <= '9') || lower == '\'') {
      out.push_back(lower);
    }
  }
  return out;
}

std::vector<std::string_view> whitespace_split(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

}  // namespace

std::vector<TweetRecord> parse_dataset(std::istream& in) {
  std::vector<TweetRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim_cr(line);
    if (row.empty()) continue;
    const auto fields = textio::split(row, '\t');
    if (fields.size() != 4) {
      throw DatasetError("malformed row at line " + std::to_string(line_no) + ": expected 4 "
                         "tab-separated fields, found " + std::to_string(fields.size()),
                         line_no);
    }
    int score = 0;
    const std::string_view s = fields[3];
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), score);
    if (ec == std::errc::result_out_of_range) {
      throw DatasetError("score out of range at line " + std::to_string(line_no), line_no);
    }
    if (ec != std::errc() || end != s.data() + s.size()) {
      throw DatasetError("score is not an integer at line " + std::to_string(line_no),
                         line_no);
    }
    if (score < -2 || score > 2) {
      throw DatasetError("score out of range at line " + std::to_string(line_no), line_no);
    }
    if (fields[0].empty() || fields[2].empty()) {
      throw DatasetError("empty id or topic at line " + std::to_string(line_no), line_no);
    }
    TweetRecord rec;
    rec.id = std::string(fields[0]);
    rec.raw_text = std::string(fields[1]);
    rec.topic = std::string(fields[2]);
    rec.score = score;
    rec.tokens = clean_tweet(rec.raw_text);
    rec.dropped = rec.tokens.empty();
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw DatasetError("empty file", 0);
  return records;
}

std::vector<TweetRecord> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open dataset " + path.string(), 0);
  return parse_dataset(in);
}

std::vector<std::string> clean_tweet(std::string_view raw_text) {
  static const std::regex kTag("<[^>]*>");
  static const std::regex kEntity("&(#[0-9]+|#[xX][0-9a-fA-F]+|[a-zA-Z]+);");

  std::string text(raw_text);
  text = std::regex_replace(text, kTag, " ");
  text = std::regex_replace(text, kEntity, " ");

  std::vector<std::string_view> kept;
  for (std::string_view tok : whitespace_split(text)) {
    if (is_url(tok) || tok.front() == '@') continue;
    kept.push_back(tok);
  }
  std::size_t end = kept.size();
  while (end > 0 && kept[end - 1].front() == '#') --end;

  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < end; ++i) {
    std::string tok = normalize_token(kept[i]);
    if (!tok.empty()) tokens.push_back(std::move(tok));
  }
  return tokens;
}

std::vector<TweetRecord> rebalance(std::span<const TweetRecord> records,
                                   double drop_fraction, std::uint64_t seed) {
  if (!(drop_fraction >= 0.0 && drop_fraction < 1.0)) {
    throw std::invalid_argument("rebalance: drop_fraction must be in [0, 1)");
  }
  std::vector<std::size_t> positive, neutral;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].score > 0) positive.push_back(i);
    if (records[i].score == 0) neutral.push_back(i);
  }
  std::vector<bool> drop(records.size(), false);
  Rng rng(seed);
  for (auto* cls : {&positive, &neutral}) {
    const auto count = static_cast<std::size_t>(
        std::floor(drop_fraction * static_cast<double>(cls->size())));
    // Partial Fisher-Yates: the first `count` slots become the dropped sample.
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t j = k + rng.below(cls->size() - k);
      std::swap((*cls)[k], (*cls)[j]);
      drop[(*cls)[k]] = true;
    }
  }
  std::vector<TweetRecord> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!drop[i]) out.push_back(records[i]);
  }
  return out;
}

SplitSet split(std::span<const TweetRecord> records, std::size_t train_n, std::size_t val_n,
               std::uint64_t seed) {
  if (train_n + val_n > records.size()) {
    throw std::invalid_argument("split: train_n + val_n = " + std::to_string(train_n + val_n) +
                                " exceeds corpus size " + std::to_string(records.size()));
  }
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  SplitSet out;
  out.seed = seed;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const TweetRecord& rec = records[order[k]];
    if (k < train_n) {
      out.train.push_back(rec);
    } else if (k < train_n + val_n) {
      out.validation.push_back(rec);
    } else {
      out.test.push_back(rec);
    }
  }
  return out;
}

std::string to_tsv(std::span<const TweetRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += r.id;
    out += '\t';
    out += r.raw_text;
    out += '\t';
    out += r.topic;
    out += '\t';
    out += std::to_string(r.score);
    out += '\n';
  }
  return out;
}

void save_splits(const SplitSet& splits, const std::filesystem::path& dir) {
  textio::write_file(dir / "train.tsv", to_tsv(splits.train));
  textio::write_file(dir / "validation.tsv", to_tsv(splits.validation));
  textio::write_file(dir / "test.tsv", to_tsv(splits.test));
  nlohmann::ordered_json manifest;
  manifest["seed"] = splits.seed;
  manifest["counts"] = {{"train", splits.train.size()},
                        {"validation", splits.validation.size()},
                        {"test", splits.test.size()}};
  textio::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

SplitSet load_splits(const std::filesystem::path& dir) {
  const auto manifest = nlohmann::json::parse(textio::read_file(dir / "manifest.json"));
  auto read_part = [&](const char* name) -> std::vector<TweetRecord> {
    const auto content = textio::read_file(dir / name);
    if (content.empty()) return {};
    std::istringstream in(content);
    return parse_dataset(in);
  };
  SplitSet out;
  out.seed = manifest.at("seed").get<std::uint64_t>();
  out.train = read_part("train.tsv");
  out.validation = read_part("validation.tsv");
  out.test = read_part("test.tsv");
  return out;
}

int class_of(int score, int num_classes) {
  if (score < -2 || score > 2) throw std::invalid_argument("class_of: score outside [-2, 2]");
  if (num_classes == 3) return score < 0 ? 0 : (score == 0 ? 1 : 2);
  if (num_classes == 5) return score + 2;
  throw std::invalid_argument("class_of: num_classes must be 3 or 5");
}

}  // namespace topicsent
