#include "planted_corpus.hpp"

#include <set>
#include <stdexcept>

#include "topicsent/rng.hpp"

namespace topicsent::testing {
namespace {

const char* const kTopicNames[] = {"apple",  "samsung", "messi",   "obama",
                                   "netflix", "tesla",  "beyonce", "amazon prime day",
                                   "real madrid", "google", "xbox", "nasa"};

std::string marker_word(std::size_t topic, int sign, std::size_t j) {
  return std::string("m") + static_cast<char>('a' + topic) + (sign > 0 ? "p" : "n") +
         std::to_string(j);
}

}  // namespace

std::size_t PlantedCorpus::vocabulary_size() const {
  std::set<std::string> words(filler_words.begin(), filler_words.end());
  for (const auto& m : markers) words.insert(m.word);
  for (const auto& t : topic_names) {
    std::size_t start = 0;
    while (start <= t.size()) {
      const auto end = t.find(' ', start);
      words.insert(t.substr(start, end == std::string::npos ? std::string::npos : end - start));
      if (end == std::string::npos) break;
      start = end + 1;
    }
  }
  return words.size();
}

std::string planted_tweet(const PlantedCorpus& corpus, std::size_t topic,
                          const std::vector<std::string>& markers, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::string> words;
  const std::size_t fill =
      corpus.min_fillers + rng.below(corpus.max_fillers - corpus.min_fillers + 1);
  for (std::size_t i = 0; i < fill; ++i) {
    words.push_back(corpus.filler_words[rng.below(corpus.filler_words.size())]);
  }
  words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.below(words.size() + 1)),
               corpus.topic_names[topic]);
  for (const auto& m : markers) {
    words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.below(words.size() + 1)), m);
  }
  std::string text;
  for (const auto& w : words) {
    if (!text.empty()) text += ' ';
    text += w;
  }
  return text;
}

PlantedCorpus make_planted_corpus(const PlantedSpec& spec) {
  if (spec.topics > std::size(kTopicNames)) throw std::invalid_argument("too many planted topics");
  if (spec.min_fillers > spec.max_fillers) throw std::invalid_argument("min_fillers > max_fillers");
  PlantedCorpus out;
  out.min_fillers = spec.min_fillers;
  out.max_fillers = spec.max_fillers;
  for (std::size_t a = 0; a < spec.topics; ++a) out.topic_names.emplace_back(kTopicNames[a]);
  for (std::size_t i = 0; i < spec.fillers; ++i) {
    std::string w = "w" + std::to_string(i);
    out.filler_words.push_back(w);
  }
  for (std::size_t a = 0; a < spec.topics; ++a) {
    for (int sign : {+1, -1}) {
      for (std::size_t j = 0; j < spec.markers_per_polarity; ++j) {
        out.markers.push_back({marker_word(a, sign, j), out.topic_names[a], sign});
      }
    }
  }

  Rng rng(spec.seed);
  const std::size_t per_topic = 2 * spec.markers_per_polarity;
  for (std::size_t i = 0; i < spec.tweets; ++i) {
    const std::size_t a = rng.below(spec.topics);
    const std::size_t cls = rng.below(3);  // 0 negative, 1 neutral, 2 positive
    const std::size_t count = cls == 1 ? 0 : 1 + rng.below(2);
    std::vector<std::string> planted;
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t offset = (cls == 2 ? 0 : spec.markers_per_polarity) +
                                 rng.below(spec.markers_per_polarity);
      planted.push_back(out.markers[a * per_topic + offset].word);
    }
    if (spec.distractor_rate > 0.0 && spec.topics > 1 && rng.uniform() < spec.distractor_rate) {
      std::size_t b = rng.below(spec.topics - 1);
      if (b >= a) ++b;
      planted.push_back(out.markers[b * per_topic + rng.below(per_topic)].word);
    }
    int score = 0;
    if (cls == 2) score = static_cast<int>(count);
    if (cls == 0) score = -static_cast<int>(count);

    TweetRecord rec;
    rec.id = std::to_string(100000 + i);
    rec.raw_text = planted_tweet(out, a, planted, rng.next());
    rec.topic = out.topic_names[a];
    rec.score = score;
    rec.tokens = clean_tweet(rec.raw_text);
    out.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace topicsent::testing
