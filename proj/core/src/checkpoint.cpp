#include "topicsent/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "topicsent/textio.hpp"

namespace topicsent {

static_assert(std::endian::native == std::endian::little,
              "checkpoint payloads assume a little-endian host");

Checkpoint::Checkpoint() {
  doc_ = {{"format_version", kFormatVersion},
          {"config", nlohmann::json::object()},
          {"tensors", nlohmann::json::object()},
          {"tables", nlohmann::json::object()}};
}

void Checkpoint::set_config(const std::string& section, nlohmann::json value) {
  doc_["config"][section] = std::move(value);
}

bool Checkpoint::has_config(const std::string& section) const {
  return doc_["config"].contains(section);
}

const nlohmann::json& Checkpoint::config(const std::string& section) const {
  const auto& cfg = doc_["config"];
  auto it = cfg.find(section);
  if (it == cfg.end()) throw CheckpointError("checkpoint has no config section '" + section + "'");
  return *it;
}

void Checkpoint::put_tensor(const std::string& name, const Tensor& tensor) {
  std::string bytes(tensor.size() * sizeof(double), '\0');
  if (!bytes.empty()) std::memcpy(bytes.data(), tensor.data(), bytes.size());
  doc_["tensors"][name] = {{"shape", tensor.shape()}, {"data", textio::base64_encode(bytes)}};
}

bool Checkpoint::has_tensor(const std::string& name) const {
  return doc_["tensors"].contains(name);
}

Tensor Checkpoint::tensor(const std::string& name) const {
  const auto& tensors = doc_["tensors"];
  auto it = tensors.find(name);
  if (it == tensors.end()) throw CheckpointError("checkpoint has no tensor '" + name + "'");
  const auto shape = it->at("shape").get<Tensor::Shape>();
  const std::string bytes = textio::base64_decode(it->at("data").get<std::string>());
  if (bytes.size() != shape_size(shape) * sizeof(double)) {
    throw CheckpointError("tensor '" + name + "' payload does not match its shape");
  }
  std::vector<double> data(shape_size(shape));
  if (!bytes.empty()) std::memcpy(data.data(), bytes.data(), bytes.size());
  return Tensor(shape, std::move(data));
}

std::vector<std::string> Checkpoint::tensor_names() const {
  std::vector<std::string> names;
  for (const auto& [key, _] : doc_["tensors"].items()) names.push_back(key);
  return names;
}

void Checkpoint::put_table(const std::string& name, const StringIndex& index) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : index.entries()) rows.push_back({e.text, e.freq});
  doc_["tables"][name] = std::move(rows);
}

bool Checkpoint::has_table(const std::string& name) const {
  return doc_["tables"].contains(name);
}

StringIndex Checkpoint::table(const std::string& name) const {
  const auto& tables = doc_["tables"];
  auto it = tables.find(name);
  if (it == tables.end()) throw CheckpointError("checkpoint has no table '" + name + "'");
  std::vector<StringIndex::Entry> entries;
  for (const auto& row : *it) {
    entries.push_back({row.at(0).get<std::string>(), row.at(1).get<std::uint64_t>()});
  }
  return StringIndex(std::move(entries));
}

void Checkpoint::merge(const Checkpoint& other) {
  for (const char* key : {"config", "tensors", "tables"}) {
    for (const auto& [name, value] : other.doc_[key].items()) doc_[key][name] = value;
  }
}

std::string Checkpoint::dump() const { return doc_.dump(1) + "\n"; }

Checkpoint Checkpoint::parse(std::string_view text) {
  Checkpoint out;
  try {
    out.doc_ = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw CheckpointError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  if (!out.doc_.is_object() || !out.doc_.contains("format_version")) {
    throw CheckpointError("checkpoint lacks format_version");
  }
  const int version = out.doc_["format_version"].get<int>();
  if (version != kFormatVersion) {
    throw CheckpointError("unsupported checkpoint format_version " + std::to_string(version));
  }
  for (const char* key : {"config", "tensors", "tables"}) {
    if (!out.doc_.contains(key)) out.doc_[key] = nlohmann::json::object();
  }
  return out;
}

void Checkpoint::save(const std::filesystem::path& path) const {
  textio::write_file(path, dump());
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw CheckpointError("checkpoint not found: " + path.string());
  }
  return parse(textio::read_file(path));
}

}  // namespace topicsent
