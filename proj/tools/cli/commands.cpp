#include "commands.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>

#include "config.hpp"
#include "topicsent/baseline.hpp"
#include "topicsent/checkpoint.hpp"
#include "topicsent/classifier.hpp"
#include "topicsent/corpus.hpp"
#include "topicsent/embedding_table.hpp"
#include "topicsent/evalkit.hpp"
#include "topicsent/insight.hpp"
#include "topicsent/rng.hpp"
#include "topicsent/textio.hpp"
#include "topicsent/vocab.hpp"
#include "topicsent/word2topic.hpp"

namespace topicsent::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// Split sizes of the published corpus: 13300 train and 700 validation
// tweets out of 16895 after rebalancing.
constexpr std::size_t kRefTotal = 16895;
constexpr std::size_t kRefTrain = 13300;
constexpr std::size_t kRefVal = 700;

// Salts for sub-streams of the corpus seed.
constexpr std::uint64_t kRebalanceSalt = 1;
constexpr std::uint64_t kSplitSalt = 2;
constexpr std::uint64_t kRandomTableSalt = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::shared_ptr<spdlog::logger> logger() {
  static auto log = [] {
    auto l = std::make_shared<spdlog::logger>(
        "topicsent", std::make_shared<spdlog::sinks::stderr_sink_mt>());
    l->set_pattern("[%l] %v");
    return l;
  }();
  return log;
}

struct Paths {
  fs::path root;
  fs::path splits() const { return root / "splits"; }
  fs::path labels() const { return root / "labels.ckpt.json"; }
  fs::path embed() const { return root / "embed.ckpt.json"; }
  fs::path classifier(int k) const { return root / ("clf" + std::to_string(k) + ".ckpt.json"); }
  fs::path manifest(const std::string& command) const {
    return root / "manifests" / (command + ".json");
  }
};

/// Collects what a command read and wrote, then records it next to the
/// effective configuration. Contains no timestamps so reruns match.
class Manifest {
 public:
  Manifest(std::string command, const PipelineConfig& config, const Paths& paths)
      : command_(std::move(command)), config_(config), paths_(paths) {}

  void seed(const std::string& name, std::uint64_t value) { seeds_[name] = value; }
  void input(const fs::path& p) { inputs_[p.generic_string()] = hash_of(p); }
  void output(const fs::path& p) { outputs_[relative(p)] = hash_of(p); }
  void note(const std::string& key, ojson value) { notes_[key] = std::move(value); }

  void write() const {
    ojson doc;
    doc["command"] = command_;
    doc["config_sha256"] = config_.hash();
    doc["config"] = config_.canonical();
    doc["seeds"] = seeds_;
    doc["inputs"] = inputs_;
    doc["outputs"] = outputs_;
    if (!notes_.empty()) doc["details"] = notes_;
    textio::write_file(paths_.manifest(command_), doc.dump(2) + "\n");
  }

 private:
  static std::string hash_of(const fs::path& p) { return textio::sha256_hex(textio::read_file(p)); }
  std::string relative(const fs::path& p) const {
    const auto rel = p.lexically_relative(paths_.root);
    return (rel.empty() || *rel.begin() == "..") ? p.generic_string() : rel.generic_string();
  }

  std::string command_;
  const PipelineConfig& config_;
  const Paths& paths_;
  ojson seeds_ = ojson::object();
  ojson inputs_ = ojson::object();
  ojson outputs_ = ojson::object();
  ojson notes_ = ojson::object();
};

void write_output(Manifest& manifest, const fs::path& path, std::string_view content) {
  textio::write_file(path, content);
  manifest.output(path);
}

void require_file(const fs::path& p, const std::string& what) {
  if (!fs::exists(p)) {
    throw std::runtime_error(what + " not found: " + p.string() +
                             " (run the earlier pipeline step first or pass its path)");
  }
}

Checkpoint load_checkpoint(const fs::path& p, Manifest& manifest) {
  require_file(p, "checkpoint");
  manifest.input(p);
  return Checkpoint::load(p);
}

std::string to_json_line(const ojson& doc) { return doc.dump() + "\n"; }

// ---------------------------------------------------------------- commands

void cmd_preprocess(const PipelineConfig& cfg, const Paths& paths) {
  if (cfg.input.empty()) throw UsageError("preprocess needs an input file (--input or [data] input)");
  require_file(cfg.input, "input dataset");
  Manifest manifest("preprocess", cfg, paths);
  manifest.input(cfg.input);

  const auto records = load_dataset(cfg.input);
  std::vector<TweetRecord> kept;
  for (const auto& r : records) {
    if (!r.dropped) kept.push_back(r);
  }
  logger()->info("loaded {} tweets, {} empty after cleaning", records.size(),
                 records.size() - kept.size());

  const auto rebalance_seed = Rng::derive(cfg.seed, kRebalanceSalt);
  const auto split_seed = Rng::derive(cfg.seed, kSplitSalt);
  const auto balanced = rebalance(kept, cfg.drop_fraction, rebalance_seed);
  const std::size_t n = balanced.size();
  const std::size_t train_n = cfg.train_n.value_or(n * kRefTrain / kRefTotal);
  const std::size_t val_n = cfg.val_n.value_or(n * kRefVal / kRefTotal);
  if (train_n + val_n > n) {
    throw std::runtime_error("train_n + val_n = " + std::to_string(train_n + val_n) +
                             " exceeds the " + std::to_string(n) + " rebalanced tweets");
  }
  if (train_n == 0) throw std::runtime_error("training split would be empty");
  const auto splits = split(balanced, train_n, val_n, split_seed);
  logger()->info("rebalanced to {}; split {}/{}/{}", n, splits.train.size(),
                 splits.validation.size(), splits.test.size());

  const auto vocab = Vocabulary::build(splits.train, cfg.min_freq);
  const auto topics = TopicIndex::build(balanced);
  const auto labels = build_label_matrix(splits.train, vocab, topics);
  logger()->info("vocabulary {} words (min_freq {}), {} topics", vocab.size(), cfg.min_freq,
                 topics.size());

  save_splits(splits, paths.splits());
  for (const char* name : {"train.tsv", "validation.tsv", "test.tsv", "manifest.json"}) {
    manifest.output(paths.splits() / name);
  }
  write_output(manifest, paths.root / "vocab.tsv", vocab.to_tsv());
  write_output(manifest, paths.root / "topics.tsv", topics.to_tsv());

  Checkpoint ckpt;
  ckpt.set_config("vocab", {{"min_freq", cfg.min_freq}});
  ckpt.put_table("vocab", vocab);
  ckpt.put_table("topics", topics);
  ckpt.put_tensor("labels.values", labels.values);
  Tensor support({labels.words(), labels.topics()});
  for (std::size_t i = 0; i < labels.support.size(); ++i) {
    support[i] = static_cast<double>(labels.support[i]);
  }
  ckpt.put_tensor("labels.support", support);
  ckpt.save(paths.labels());
  manifest.output(paths.labels());

  manifest.seed("corpus", cfg.seed);
  manifest.seed("rebalance", rebalance_seed);
  manifest.seed("split", split_seed);
  manifest.note("counts", {{"loaded", records.size()},
                           {"kept", kept.size()},
                           {"rebalanced", n},
                           {"train", splits.train.size()},
                           {"validation", splits.validation.size()},
                           {"test", splits.test.size()},
                           {"vocabulary", vocab.size()},
                           {"topics", topics.size()}});
  manifest.write();
}

void cmd_train_embed(const PipelineConfig& cfg, const Paths& paths) {
  Manifest manifest("train-embed", cfg, paths);
  const auto labels_ckpt = load_checkpoint(paths.labels(), manifest);
  const Vocabulary vocab(labels_ckpt.table("vocab"),
                         labels_ckpt.config("vocab").at("min_freq").get<std::size_t>());
  const TopicIndex topics(labels_ckpt.table("topics"));
  LabelMatrix labels;
  labels.values = labels_ckpt.tensor("labels.values");
  for (double v : labels_ckpt.tensor("labels.support").values()) {
    labels.support.push_back(static_cast<std::uint32_t>(v));
  }

  logger()->info("word2topic: {} words x {} topics, arch {}, {} epochs", labels.words(),
                 labels.topics(), to_string(cfg.embed.arch), cfg.embed.epochs);
  Word2TopicHistory history;
  auto model = train_word2topic(labels, cfg.embed, &history, [](std::size_t e, double loss) {
    logger()->info("embed epoch {} loss {}", e, textio::format_double(loss));
  });
  const auto table = export_table(model, vocab, topics, &labels);

  Checkpoint ckpt;
  model.save(ckpt);
  table.save(ckpt);
  ckpt.save(paths.embed());
  manifest.output(paths.embed());
  write_output(manifest, paths.root / "embeddings.tsv", table.embeddings_tsv());
  write_output(manifest, paths.root / "word_topic.tsv", table.scores_tsv());
  write_output(manifest, paths.root / "embed_history.json",
               ojson{{"loss", history.loss}}.dump(2) + "\n");
  manifest.seed("embed", cfg.embed.seed);
  manifest.write();
}

void cmd_train_clf(PipelineConfig cfg, const Paths& paths, std::optional<int> classes) {
  if (classes) cfg.classifier.num_classes = *classes;
  Manifest manifest("train-clf", cfg, paths);
  const auto embed_ckpt = load_checkpoint(paths.embed(), manifest);
  const auto table = EmbeddingTable::load(embed_ckpt);
  require_file(paths.splits() / "manifest.json", "splits");
  const auto splits = load_splits(paths.splits());
  cfg.classifier.embed_dim = table.dim();
  cfg.classifier.validate();

  logger()->info("classifier: {} classes, {} epochs, {} training tweets",
                 cfg.classifier.num_classes, cfg.classifier.epochs, splits.train.size());
  ClassifierHistory history;
  auto model = train_classifier(splits, table, cfg.classifier, &history,
                                [](std::size_t e, double loss, double acc) {
                                  logger()->info("clf epoch {} loss {} val_acc {}", e,
                                                 textio::format_double(loss),
                                                 textio::format_double(acc));
                                });
  logger()->info("best epoch {}", history.best_epoch);

  Checkpoint ckpt;
  table.save(ckpt);
  model.save(ckpt);
  const auto out = paths.classifier(cfg.classifier.num_classes);
  ckpt.save(out);
  manifest.output(out);
  const auto stem = "clf" + std::to_string(cfg.classifier.num_classes);
  write_output(manifest, paths.root / (stem + "_history.json"),
               ojson{{"initial_loss", history.initial_loss},
                     {"train_loss", history.train_loss},
                     {"val_accuracy", history.val_accuracy},
                     {"best_epoch", history.best_epoch}}
                       .dump(2) + "\n");
  manifest.seed("classifier", cfg.classifier.seed);
  manifest.seed("split", splits.seed);
  manifest.write();
}

void cmd_baseline(const PipelineConfig& cfg, const Paths& paths) {
  Manifest manifest("baseline", cfg, paths);
  const auto table = EmbeddingTable::load(load_checkpoint(paths.embed(), manifest));
  require_file(paths.splits() / "manifest.json", "splits");
  const auto splits = load_splits(paths.splits());

  EmbeddingTable other;
  std::string other_name;
  if (!cfg.compare_table.empty()) {
    require_file(cfg.compare_table, "comparison table");
    manifest.input(cfg.compare_table);
    other = EmbeddingTable::from_tsv(textio::read_file(cfg.compare_table), table.vocab());
    other_name = cfg.compare_table.stem().string();
  } else {
    const auto seed = Rng::derive(cfg.baseline.seed, kRandomTableSalt);
    other = EmbeddingTable::random(table.vocab(), cfg.random_dim, seed);
    other_name = "random";
    manifest.seed("random_table", seed);
  }

  const auto report = compare_embeddings(table, "word2topic", other, other_name, splits,
                                         table.topics(), cfg.baseline, cfg.classifier.pad_len);
  const auto dir = paths.root / "baseline";
  write_report(report, dir);
  manifest.output(dir / "report.json");
  manifest.output(dir / ("confusion_" + report.first.name + ".csv"));
  manifest.output(dir / ("confusion_" + report.second.name + ".csv"));
  manifest.seed("baseline", cfg.baseline.seed);
  manifest.seed("split", splits.seed);
  manifest.write();
  std::cout << to_json_line({{"first", report.first.name},
                             {"first_accuracy", report.first.accuracy},
                             {"second", report.second.name},
                             {"second_accuracy", report.second.accuracy}});
}

void cmd_evaluate(const PipelineConfig& cfg, const Paths& paths, fs::path checkpoint,
                  const std::string& split_name) {
  if (checkpoint.empty()) checkpoint = paths.classifier(cfg.classifier.num_classes);
  Manifest manifest("evaluate", cfg, paths);
  const auto ckpt = load_checkpoint(checkpoint, manifest);
  const auto table = EmbeddingTable::load(ckpt);
  auto model = ClassifierModel::load(ckpt);
  require_file(paths.splits() / "manifest.json", "splits");
  const auto splits = load_splits(paths.splits());
  const std::vector<TweetRecord>* records = nullptr;
  if (split_name == "train") records = &splits.train;
  if (split_name == "validation") records = &splits.validation;
  if (split_name == "test") records = &splits.test;
  if (!records) throw UsageError("unknown split '" + split_name + "'");
  if (records->empty()) throw std::runtime_error("split '" + split_name + "' is empty");

  const auto set = encode_records(*records, table, model.config());
  const auto preds = predict_labels(set, model, table);
  const int k = model.config().num_classes;
  const auto cm = confusion(set.labels, preds, static_cast<std::size_t>(k),
                            sentiment_class_names(k));
  const auto m = metrics(cm);
  const auto doc = to_json(cm, m);

  const auto stem = checkpoint.stem().stem().string() + "_" + split_name;
  write_output(manifest, paths.root / "eval" / (stem + ".json"), doc.dump(2) + "\n");
  write_output(manifest, paths.root / "eval" / (stem + ".csv"), to_csv(cm));
  manifest.seed("split", splits.seed);
  manifest.write();
  std::cout << to_json_line(doc);
}

void cmd_predict(const PipelineConfig& cfg, const Paths& paths, fs::path checkpoint,
                 const std::string& tweet, const std::string& topic, bool all_topics) {
  if (!all_topics && topic.empty()) throw UsageError("predict needs --topic or --all-topics");
  if (checkpoint.empty()) checkpoint = paths.classifier(cfg.classifier.num_classes);
  Manifest manifest("predict", cfg, paths);
  const auto ckpt = load_checkpoint(checkpoint, manifest);
  const auto table = EmbeddingTable::load(ckpt);
  auto model = ClassifierModel::load(ckpt);
  const auto names = sentiment_class_names(model.config().num_classes);

  ojson doc;
  if (all_topics) {
    const auto ids = encode_tweet(clean_tweet(tweet), table.vocab(), model.config().pad_len);
    const auto probs = predict_all_topics(ids, model, table, table.topics());
    ojson rows = ojson::array();
    for (std::size_t a = 0; a < probs.rows(); ++a) {
      const auto row = probs.row(a);
      const auto best = static_cast<std::size_t>(
          std::max_element(row.begin(), row.end()) - row.begin());
      rows.push_back({{"topic", table.topics().topic(static_cast<int>(a))},
                      {"label", names[best]},
                      {"class", best},
                      {"probs", std::vector<double>(row.begin(), row.end())}});
    }
    doc = {{"tweet", tweet}, {"topics", std::move(rows)}};
  } else {
    const auto p = predict(tweet, topic, model, table);
    doc = {{"label", names[static_cast<std::size_t>(p.label)]},
           {"class", p.label},
           {"topic", p.topic},
           {"probs", p.probs}};
  }
  manifest.write();
  std::cout << to_json_line(doc);
}

void emit(Manifest& manifest, const fs::path& out, const std::string& content) {
  if (out.empty()) {
    std::cout << content;
  } else {
    write_output(manifest, out, content);
  }
}

void cmd_explain_word(const PipelineConfig& cfg, const Paths& paths, fs::path checkpoint,
                      const std::string& word, std::size_t rows, std::size_t cols,
                      const fs::path& out) {
  if (checkpoint.empty()) checkpoint = paths.embed();
  Manifest manifest("explain-word", cfg, paths);
  const auto table = EmbeddingTable::load(load_checkpoint(checkpoint, manifest));
  if (rows == 0 || cols == 0) {
    std::tie(rows, cols) = default_grid_shape(table.topics().size());
  }
  const auto grid = word_grid(table, word, rows, cols);
  emit(manifest, out, grid_csv(grid));
  manifest.write();
}

void cmd_top_words(const PipelineConfig& cfg, const Paths& paths, fs::path checkpoint,
                   const std::string& topic, std::size_t k, const std::string& sign,
                   bool include_unsupported, const fs::path& out) {
  if (checkpoint.empty()) checkpoint = paths.embed();
  Manifest manifest("top-words", cfg, paths);
  const auto table = EmbeddingTable::load(load_checkpoint(checkpoint, manifest));
  const auto ranked = top_words(table, topic, k, parse_polarity(sign), include_unsupported);
  emit(manifest, out, top_words_csv(ranked));
  manifest.write();
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Topic-conditioned tweet sentiment toolkit", "topicsent"};
  app.require_subcommand(1);
  app.fallthrough();

  fs::path config_path, workdir, input;
  bool quiet = false;
  app.add_option("-c,--config", config_path, "INI/TOML-style configuration file");
  app.add_option("-w,--workdir", workdir, "Directory for artifacts (overrides [data] workdir)");
  app.add_option("-i,--input", input, "Tab-separated dataset (overrides [data] input)");
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");

  auto* preprocess = app.add_subcommand("preprocess", "Clean, rebalance and split a dataset");
  auto* train_embed = app.add_subcommand("train-embed", "Train word2topic embeddings");
  auto* train_clf = app.add_subcommand("train-clf", "Train the BiLSTM classifier");
  auto* baseline = app.add_subcommand("baseline", "Compare embeddings with logistic regression");
  auto* evaluate = app.add_subcommand("evaluate", "Score a classifier checkpoint on a split");
  auto* predict_cmd = app.add_subcommand("predict", "Classify one tweet");
  auto* explain = app.add_subcommand("explain-word", "Emit a word's topic score grid as CSV");
  auto* top = app.add_subcommand("top-words", "Rank words for a topic as CSV");

  std::optional<int> classes;
  train_clf->add_option("--classes", classes, "3 or 5 sentiment classes")
      ->check(CLI::IsMember({3, 5}));

  fs::path checkpoint;
  std::string split_name = "test";
  evaluate->add_option("--checkpoint", checkpoint, "Classifier checkpoint");
  evaluate->add_option("--split", split_name, "train, validation or test")
      ->check(CLI::IsMember({"train", "validation", "test"}));

  std::string tweet, topic;
  bool all_topics = false;
  predict_cmd->add_option("--checkpoint", checkpoint, "Classifier checkpoint");
  predict_cmd->add_option("--tweet", tweet, "Raw tweet text")->required();
  predict_cmd->add_option("--topic", topic, "Topic to condition on");
  predict_cmd->add_flag("--all-topics", all_topics, "Predict once per known topic");

  std::string word;
  std::size_t rows = 0, cols = 0;
  fs::path out;
  explain->add_option("--checkpoint", checkpoint, "Embedding checkpoint");
  explain->add_option("--word", word, "Word to explain")->required();
  explain->add_option("--rows", rows, "Grid rows (default: near-square)");
  explain->add_option("--cols", cols, "Grid columns");
  explain->add_option("-o,--out", out, "Output CSV (default: stdout)");

  std::size_t k = 10;
  std::string sign = "positive";
  bool include_unsupported = false;
  top->add_option("--checkpoint", checkpoint, "Embedding checkpoint");
  top->add_option("--topic", topic, "Topic name")->required();
  top->add_option("-k", k, "Number of words");
  top->add_option("--sign", sign, "positive or negative")
      ->check(CLI::IsMember({"positive", "negative"}));
  top->add_flag("--include-unsupported", include_unsupported,
                "Also rank words never seen with the topic");
  top->add_option("-o,--out", out, "Output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  logger()->set_level(quiet ? spdlog::level::warn : spdlog::level::info);
  try {
    PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : load_config(config_path);
    if (!workdir.empty()) cfg.workdir = workdir;
    if (!input.empty()) cfg.input = input;
    const Paths paths{cfg.workdir};
    logger()->info("config sha256 {}", cfg.hash());

    if (*preprocess) cmd_preprocess(cfg, paths);
    if (*train_embed) cmd_train_embed(cfg, paths);
    if (*train_clf) cmd_train_clf(cfg, paths, classes);
    if (*baseline) cmd_baseline(cfg, paths);
    if (*evaluate) cmd_evaluate(cfg, paths, checkpoint, split_name);
    if (*predict_cmd) cmd_predict(cfg, paths, checkpoint, tweet, topic, all_topics);
    if (*explain) cmd_explain_word(cfg, paths, checkpoint, word, rows, cols, out);
    if (*top) {
      cmd_top_words(cfg, paths, checkpoint, topic, k, sign, include_unsupported, out);
    }
    return kOk;
  } catch (const UsageError& e) {
    logger()->error("{}", e.what());
    std::cerr << app.help();
    return kUsage;
  } catch (const DatasetError& e) {
    logger()->error("dataset: {}", e.what());
  } catch (const ConfigError& e) {
    logger()->error("{}", e.what());
  } catch (const std::exception& e) {
    logger()->error("{}", e.what());
  }
  return kFailure;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"topicsent"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace topicsent::cli
