#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace topicsent {

/// One labeled tweet. tokens holds the cleaned form of raw_text; a record
/// whose cleaning leaves no tokens is flagged dropped.
struct TweetRecord {
  std::string id;
  std::string raw_text;
  std::vector<std::string> tokens;
  std::string topic;
  int score = 0;  // -2..+2
  bool dropped = false;

  friend bool operator==(const TweetRecord&, const TweetRecord&) = default;
};

struct SplitSet {
  std::vector<TweetRecord> train;
  std::vector<TweetRecord> validation;
  std::vector<TweetRecord> test;
  std::uint64_t seed = 0;
};

/// Input problem tied to a line of the source file (1-based; 0 when the
/// problem concerns the file as a whole).
class DatasetError : public std::runtime_error {
 public:
  DatasetError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Parses `id<TAB>text<TAB>topic<TAB>score` rows. Blank lines are skipped;
/// CRLF endings are accepted.
std::vector<TweetRecord> parse_dataset(std::istream& in);
std::vector<TweetRecord> load_dataset(const std::filesystem::path& path);

/// HTML tags and entities, URLs and @mentions are removed; '#' is stripped
/// from inline hashtags while a trailing run of hashtags is dropped whole;
/// text is lowercased and every character outside [a-z0-9'] is deleted.
std::vector<std::string> clean_tweet(std::string_view raw_text);

/// Drops floor(drop_fraction * count) records, chosen uniformly at random,
/// from the positive (score > 0) and neutral (score == 0) classes
/// separately. Negative records and relative order are untouched.
std::vector<TweetRecord> rebalance(std::span<const TweetRecord> records,
                                   double drop_fraction, std::uint64_t seed);

/// Seeded shuffle, then the first train_n records train, the next val_n
/// validate and the remainder test.
SplitSet split(std::span<const TweetRecord> records, std::size_t train_n, std::size_t val_n,
               std::uint64_t seed);

/// Serializes records back to the 4-column input format.
std::string to_tsv(std::span<const TweetRecord> records);

/// Writes train.tsv, validation.tsv, test.tsv and manifest.json into dir.
void save_splits(const SplitSet& splits, const std::filesystem::path& dir);
SplitSet load_splits(const std::filesystem::path& dir);

/// 3-class mapping by sign (0 negative, 1 neutral, 2 positive) or the
/// 5-class mapping score + 2.
int class_of(int score, int num_classes);

}  // namespace topicsent
