#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "topicsent/baseline.hpp"
#include "topicsent/classifier.hpp"
#include "topicsent/word2topic.hpp"

namespace topicsent::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every tunable of the pipeline. Defaults reproduce the published setup:
/// min_freq 3, drop 1/3, pad 30, embed 100, lr 0.0005, batch 64, 40 epochs.
struct PipelineConfig {
  std::filesystem::path input;
  std::filesystem::path workdir = "work";

  std::size_t min_freq = 3;
  double drop_fraction = 1.0 / 3.0;
  std::optional<std::size_t> train_n;  // unset: 13300/16895 of the corpus
  std::optional<std::size_t> val_n;    // unset: 700/16895 of the corpus
  std::uint64_t seed = 0;

  Word2TopicConfig embed;
  ClassifierConfig classifier;
  LogRegConfig baseline;
  std::size_t random_dim = 100;
  std::filesystem::path compare_table;

  /// One `section.key = value` line per setting, in a fixed order. Hashing
  /// this identifies a configuration independently of file formatting.
  std::string canonical() const;
  std::string hash() const;
};

/// Parses an INI document:
///
///   [data]        input, workdir
///   [corpus]      min_freq, drop_fraction (decimal or a/b), train_n, val_n, seed
///   [embed]       arch, epochs, lr, batch_size, seed, embed_dim
///   [classifier]  num_classes, pad_len, sentence_hidden, topic_proj,
///                 stack_hidden, lr, batch_size, epochs, seed, concat
///   [baseline]    epochs, lr, l2, seed, random_dim, compare_table
///
/// Unknown sections or keys are rejected. Relative paths resolve against
/// base_dir.
PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace topicsent::cli
