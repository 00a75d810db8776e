#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topicsent/corpus.hpp"
#include "topicsent/tensor.hpp"

namespace topicsent {

/// Reserved id for padding positions; never a valid vocabulary id.
inline constexpr int kPadId = -1;

/// Dense bidirectional string <-> id map with per-entry frequencies. Shared
/// by Vocabulary (words) and TopicIndex (topics).
class StringIndex {
 public:
  struct Entry {
    std::string text;
    std::uint64_t freq = 0;
  };

  StringIndex() = default;
  explicit StringIndex(std::vector<Entry> entries);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::optional<int> find(std::string_view text) const;
  bool contains(std::string_view text) const { return find(text).has_value(); }
  const std::string& at(int id) const { return entries_.at(static_cast<std::size_t>(id)).text; }
  std::uint64_t frequency(int id) const { return entries_.at(static_cast<std::size_t>(id)).freq; }
  const std::vector<Entry>& entries() const { return entries_; }

  /// `text<TAB>id<TAB>freq` per line, in id order.
  std::string to_tsv() const;
  static StringIndex from_tsv(std::string_view content);

  friend bool operator==(const StringIndex& a, const StringIndex& b) {
    return a.entries_.size() == b.entries_.size() &&
           std::equal(a.entries_.begin(), a.entries_.end(), b.entries_.begin(),
                      [](const Entry& x, const Entry& y) {
                        return x.text == y.text && x.freq == y.freq;
                      });
  }

 private:
  std::vector<Entry> entries_;
  std::map<std::string, int, std::less<>> ids_;
};

/// Words kept at or above a frequency threshold. Ids run by descending
/// frequency, then lexicographically.
class Vocabulary : public StringIndex {
 public:
  Vocabulary() = default;
  Vocabulary(StringIndex index, std::size_t min_freq)
      : StringIndex(std::move(index)), min_freq_(min_freq) {}

  static Vocabulary build(std::span<const TweetRecord> records, std::size_t min_freq);

  const std::string& word(int id) const { return at(id); }
  std::size_t min_freq() const { return min_freq_; }

 private:
  std::size_t min_freq_ = 1;
};

/// Topics in lexicographic order; frequency is the number of tweets.
class TopicIndex : public StringIndex {
 public:
  TopicIndex() = default;
  explicit TopicIndex(StringIndex index) : StringIndex(std::move(index)) {}

  static TopicIndex build(std::span<const TweetRecord> records);

  const std::string& topic(int id) const { return at(id); }
};

/// n x t targets for the word-topic model: for each cell the mean score of
/// the tweets on that topic containing the word, divided by 2.
struct LabelMatrix {
  Tensor values;                       // [n, t], in [-1, 1]
  std::vector<std::uint32_t> support;  // row-major [n, t] tweet counts

  std::size_t words() const { return values.rows(); }
  std::size_t topics() const { return values.cols(); }
  std::uint32_t support_at(std::size_t word, std::size_t topic) const {
    return support[word * topics() + topic];
  }
};

/// Tweets contribute once per distinct word unless count_repeats is set,
/// in which case every occurrence counts.
LabelMatrix build_label_matrix(std::span<const TweetRecord> records, const Vocabulary& vocab,
                               const TopicIndex& topics, bool count_repeats = false);

/// Maps tokens to ids, dropping out-of-vocabulary tokens, then truncates or
/// right-pads with kPadId to exactly pad_len entries.
std::vector<int> encode_tweet(std::span<const std::string> tokens, const Vocabulary& vocab,
                              std::size_t pad_len);

/// Inverse of encode_tweet on the kept prefix; PAD entries are skipped.
std::vector<std::string> decode_tweet(std::span<const int> ids, const Vocabulary& vocab);

}  // namespace topicsent
