#include "topicsent/vocab.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <stdexcept>

#include "topicsent/textio.hpp"

namespace topicsent {

StringIndex::StringIndex(std::vector<Entry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto [it, inserted] = ids_.emplace(entries_[i].text, static_cast<int>(i));
    if (!inserted) throw std::invalid_argument("duplicate index entry '" + entries_[i].text + "'");
  }
}

std::optional<int> StringIndex::find(std::string_view text) const {
  auto it = ids_.find(text);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::string StringIndex::to_tsv() const {
  std::string out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    out += entries_[i].text;
    out += '\t';
    out += std::to_string(i);
    out += '\t';
    out += std::to_string(entries_[i].freq);
    out += '\n';
  }
  return out;
}

StringIndex StringIndex::from_tsv(std::string_view content) {
  std::vector<Entry> entries;
  std::size_t line_no = 0;
  for (std::string_view line : textio::split(content, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = textio::split(line, '\t');
    if (fields.size() != 3) {
      throw std::invalid_argument("index TSV line " + std::to_string(line_no) +
                                  ": expected 3 fields");
    }
    std::size_t id = 0;
    std::uint64_t freq = 0;
    auto r1 = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), id);
    auto r2 = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), freq);
    if (r1.ec != std::errc() || r2.ec != std::errc() || id != entries.size()) {
      throw std::invalid_argument("index TSV line " + std::to_string(line_no) +
                                  ": ids must be dense and in order");
    }
    entries.push_back({std::string(fields[0]), freq});
  }
  return StringIndex(std::move(entries));
}

Vocabulary Vocabulary::build(std::span<const TweetRecord> records, std::size_t min_freq) {
  if (records.empty()) throw std::invalid_argument("build_vocab: no records");
  std::map<std::string, std::uint64_t, std::less<>> counts;
  for (const auto& r : records) {
    for (const auto& tok : r.tokens) ++counts[tok];
  }
  std::vector<Entry> entries;
  for (const auto& [word, freq] : counts) {
    if (freq >= min_freq) entries.push_back({word, freq});
  }
  if (entries.empty()) {
    throw std::invalid_argument("build_vocab: every word falls below min_freq " +
                                std::to_string(min_freq));
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.freq > b.freq;  // map order already lexicographic
  });
  return Vocabulary(StringIndex(std::move(entries)), min_freq);
}

TopicIndex TopicIndex::build(std::span<const TweetRecord> records) {
  std::map<std::string, std::uint64_t, std::less<>> counts;
  for (const auto& r : records) ++counts[r.topic];
  std::vector<Entry> entries;
  for (const auto& [topic, freq] : counts) entries.push_back({topic, freq});
  return TopicIndex(StringIndex(std::move(entries)));
}

LabelMatrix build_label_matrix(std::span<const TweetRecord> records, const Vocabulary& vocab,
                               const TopicIndex& topics, bool count_repeats) {
  const std::size_t n = vocab.size();
  const std::size_t t = topics.size();
  std::vector<double> sums(n * t, 0.0);
  LabelMatrix out{Tensor::matrix(n, t), std::vector<std::uint32_t>(n * t, 0)};

  std::vector<int> ids;
  for (const auto& rec : records) {
    const auto topic = topics.find(rec.topic);
    if (!topic) throw std::invalid_argument("build_label_matrix: unknown topic '" + rec.topic + "'");
    ids.clear();
    for (const auto& tok : rec.tokens) {
      if (auto id = vocab.find(tok)) ids.push_back(*id);
    }
    if (!count_repeats) {
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    }
    for (int w : ids) {
      const std::size_t cell = static_cast<std::size_t>(w) * t + static_cast<std::size_t>(*topic);
      sums[cell] += rec.score;
      ++out.support[cell];
    }
  }
  for (std::size_t cell = 0; cell < n * t; ++cell) {
    if (out.support[cell] > 0) {
      out.values[cell] = sums[cell] / static_cast<double>(out.support[cell]) / 2.0;
    }
  }
  return out;
}

std::vector<int> encode_tweet(std::span<const std::string> tokens, const Vocabulary& vocab,
                              std::size_t pad_len) {
  if (pad_len == 0) throw std::invalid_argument("encode_tweet: pad_len must be >= 1");
  std::vector<int> ids;
  ids.reserve(pad_len);
  for (const auto& tok : tokens) {
    if (ids.size() == pad_len) break;
    if (auto id = vocab.find(tok)) ids.push_back(*id);
  }
  ids.resize(pad_len, kPadId);
  return ids;
}

std::vector<std::string> decode_tweet(std::span<const int> ids, const Vocabulary& vocab) {
  std::vector<std::string> out;
  for (int id : ids) {
    if (id != kPadId) out.push_back(vocab.word(id));
  }
  return out;
}

}  // namespace topicsent
