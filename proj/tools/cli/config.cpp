#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "topicsent/textio.hpp"

namespace topicsent::cli {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"data", {"input", "workdir"}},
      {"corpus", {"min_freq", "drop_fraction", "train_n", "val_n", "seed"}},
      {"embed", {"arch", "epochs", "lr", "batch_size", "seed", "embed_dim"}},
      {"classifier",
       {"num_classes", "pad_len", "sentence_hidden", "topic_proj", "stack_hidden", "lr",
        "batch_size", "epochs", "seed", "concat"}},
      {"baseline", {"epochs", "lr", "l2", "seed", "random_dim", "compare_table"}},
  };
  return keys;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// ini_parser only understands ';' comments and bare values; TOML-style files
// also use '#' comments and quoted strings.
std::string normalize(std::string_view text) {
  std::ostringstream out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const auto eq = t.find('=');
    if (t[0] != '[' && eq != std::string::npos) {
      std::string value = trim(std::string_view(t).substr(eq + 1));
      if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
          value.back() == value.front()) {
        value = value.substr(1, value.size() - 2);
      } else if (const auto hash = value.find(" #"); hash != std::string::npos) {
        value = trim(std::string_view(value).substr(0, hash));
      }
      t = trim(std::string_view(t).substr(0, eq)) + " = " + value;
    }
    out << t << '\n';
  }
  return out.str();
}

std::uint64_t to_unsigned(const std::string& where, const std::string& text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end) {
    throw ConfigError(where + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

double to_real(const std::string& where, const std::string& text) {
  try {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
      const double num = textio::parse_double(trim(std::string_view(text).substr(0, slash)));
      const double den = textio::parse_double(trim(std::string_view(text).substr(slash + 1)));
      if (den == 0.0) throw std::invalid_argument("zero denominator");
      return num / den;
    }
    return textio::parse_double(text);
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected a number, got '" + text + "'");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& text) {
  std::filesystem::path p(text);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

void apply(PipelineConfig& c, const std::string& section, const std::string& key,
           const std::string& value, const std::filesystem::path& base) {
  const std::string where = section + "." + key;
  const auto u = [&] { return to_unsigned(where, value); };
  const auto r = [&] { return to_real(where, value); };
  try {
    if (section == "data") {
      if (key == "input") c.input = resolve(base, value);
      if (key == "workdir") c.workdir = resolve(base, value);
    } else if (section == "corpus") {
      if (key == "min_freq") c.min_freq = u();
      if (key == "drop_fraction") c.drop_fraction = r();
      if (key == "train_n") c.train_n = u();
      if (key == "val_n") c.val_n = u();
      if (key == "seed") c.seed = u();
    } else if (section == "embed") {
      if (key == "arch") c.embed.arch = parse_word2topic_arch(value);
      if (key == "epochs") c.embed.epochs = u();
      if (key == "lr") c.embed.lr = r();
      if (key == "batch_size") c.embed.batch_size = u();
      if (key == "seed") c.embed.seed = u();
      if (key == "embed_dim") c.embed.embed_dim = u();
    } else if (section == "classifier") {
      if (key == "num_classes") c.classifier.num_classes = static_cast<int>(u());
      if (key == "pad_len") c.classifier.pad_len = u();
      if (key == "sentence_hidden") c.classifier.sentence_hidden = u();
      if (key == "topic_proj") c.classifier.topic_proj = u();
      if (key == "stack_hidden") c.classifier.stack_hidden = u();
      if (key == "lr") c.classifier.lr = r();
      if (key == "batch_size") c.classifier.batch_size = u();
      if (key == "epochs") c.classifier.epochs = u();
      if (key == "seed") c.classifier.seed = u();
      if (key == "concat") c.classifier.concat = parse_topic_concat(value);
    } else if (section == "baseline") {
      if (key == "epochs") c.baseline.epochs = u();
      if (key == "lr") c.baseline.lr = r();
      if (key == "l2") c.baseline.l2 = r();
      if (key == "seed") c.baseline.seed = u();
      if (key == "random_dim") c.random_dim = u();
      if (key == "compare_table") c.compare_table = resolve(base, value);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

void validate(const PipelineConfig& c) {
  if (!(c.drop_fraction >= 0.0 && c.drop_fraction < 1.0)) {
    throw ConfigError("corpus.drop_fraction must lie in [0, 1)");
  }
  if (c.min_freq == 0) throw ConfigError("corpus.min_freq must be at least 1");
  if (c.embed.epochs == 0 || c.embed.batch_size == 0 || c.embed.embed_dim == 0) {
    throw ConfigError("embed: epochs, batch_size and embed_dim must be positive");
  }
  if (!(c.embed.lr > 0.0) || !(c.classifier.lr > 0.0) || !(c.baseline.lr > 0.0)) {
    throw ConfigError("learning rates must be positive");
  }
  if (c.random_dim == 0) throw ConfigError("baseline.random_dim must be positive");
  try {
    c.classifier.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("classifier: ") + e.what());
  }
}

}  // namespace

std::string PipelineConfig::canonical() const {
  using textio::format_double;
  std::ostringstream o;
  const auto opt = [](const std::optional<std::size_t>& v) {
    return v ? std::to_string(*v) : std::string("auto");
  };
  o << "data.input = " << input.generic_string() << '\n'
    << "data.workdir = " << workdir.generic_string() << '\n'
    << "corpus.min_freq = " << min_freq << '\n'
    << "corpus.drop_fraction = " << format_double(drop_fraction) << '\n'
    << "corpus.train_n = " << opt(train_n) << '\n'
    << "corpus.val_n = " << opt(val_n) << '\n'
    << "corpus.seed = " << seed << '\n'
    << "embed.arch = " << to_string(embed.arch) << '\n'
    << "embed.epochs = " << embed.epochs << '\n'
    << "embed.lr = " << format_double(embed.lr) << '\n'
    << "embed.batch_size = " << embed.batch_size << '\n'
    << "embed.seed = " << embed.seed << '\n'
    << "embed.embed_dim = " << embed.embed_dim << '\n'
    << "classifier.num_classes = " << classifier.num_classes << '\n'
    << "classifier.pad_len = " << classifier.pad_len << '\n'
    << "classifier.sentence_hidden = " << classifier.sentence_hidden << '\n'
    << "classifier.topic_proj = " << classifier.topic_proj << '\n'
    << "classifier.stack_hidden = " << classifier.stack_hidden << '\n'
    << "classifier.lr = " << format_double(classifier.lr) << '\n'
    << "classifier.batch_size = " << classifier.batch_size << '\n'
    << "classifier.epochs = " << classifier.epochs << '\n'
    << "classifier.seed = " << classifier.seed << '\n'
    << "classifier.concat = " << to_string(classifier.concat) << '\n'
    << "baseline.epochs = " << baseline.epochs << '\n'
    << "baseline.lr = " << format_double(baseline.lr) << '\n'
    << "baseline.l2 = " << format_double(baseline.l2) << '\n'
    << "baseline.seed = " << baseline.seed << '\n'
    << "baseline.random_dim = " << random_dim << '\n'
    << "baseline.compare_table = " << compare_table.generic_string() << '\n';
  return o.str();
}

std::string PipelineConfig::hash() const { return textio::sha256_hex(canonical()); }

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  std::istringstream in(normalize(text));
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config: " + e.message() + " at line " + std::to_string(e.line()));
  }
  PipelineConfig config;
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) {
      if (!body.data().empty()) throw ConfigError("config: key '" + section + "' outside a section");
      throw ConfigError("config: unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) {
        throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
      }
      apply(config, section, key, value.data(), base_dir);
    }
  }
  config.classifier.embed_dim = config.embed.embed_dim;
  validate(config);
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = textio::read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("cannot read config " + path.string() + ": " + e.what());
  }
  return parse_config(text, path.parent_path());
}

}  // namespace topicsent::cli
