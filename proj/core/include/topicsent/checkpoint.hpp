#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "topicsent/tensor.hpp"
#include "topicsent/vocab.hpp"

namespace topicsent {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Versioned JSON container for named tensors, string tables and config
/// sections:
///
///   {"format_version": 1,
///    "config":  {"<section>": {...}},
///    "tensors": {"<name>": {"shape": [..], "data": "<base64>"}},
///    "tables":  {"<name>": [["text", freq], ...]}}
///
/// Tensor data is the row-major little-endian IEEE-754 binary64 payload,
/// base64 encoded. Keys serialize in sorted order, so equal contents give
/// byte-identical documents.
class Checkpoint {
 public:
  static constexpr int kFormatVersion = 1;

  Checkpoint();

  void set_config(const std::string& section, nlohmann::json value);
  bool has_config(const std::string& section) const;
  const nlohmann::json& config(const std::string& section) const;

  void put_tensor(const std::string& name, const Tensor& tensor);
  bool has_tensor(const std::string& name) const;
  Tensor tensor(const std::string& name) const;
  std::vector<std::string> tensor_names() const;

  void put_table(const std::string& name, const StringIndex& index);
  bool has_table(const std::string& name) const;
  StringIndex table(const std::string& name) const;

  /// Copies every section, tensor and table of other into this container.
  void merge(const Checkpoint& other);

  std::string dump() const;
  static Checkpoint parse(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);

 private:
  nlohmann::json doc_;
};

}  // namespace topicsent
