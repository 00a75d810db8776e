#pragma once

// Synthetic corpus whose topic-conditioned sentiment is fixed by construction.
//
// Every topic owns positive and negative marker words. A tweet about topic a
// carries 0, 1 or 2 markers of a single polarity owned by a, plus filler
// words and the topic's own name; its score is (#positive - #negative)
// markers of a. Optional distractors are markers owned by other topics,
// which do not affect the score.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "topicsent/corpus.hpp"

namespace topicsent::testing {

struct PlantedSpec {
  std::size_t tweets = 3000;
  std::size_t topics = 8;
  std::size_t markers_per_polarity = 3;
  std::size_t fillers = 244;
  std::size_t min_fillers = 4;
  std::size_t max_fillers = 8;
  double distractor_rate = 0.0;
  std::uint64_t seed = 7;
};

struct PlantedMarker {
  std::string word;
  std::string topic;
  int sign = 0;  // +1 or -1
};

struct PlantedCorpus {
  std::vector<TweetRecord> records;
  std::vector<std::string> topic_names;
  std::vector<PlantedMarker> markers;
  std::vector<std::string> filler_words;
  std::size_t min_fillers = 4;
  std::size_t max_fillers = 8;

  /// Distinct words the generator can emit.
  std::size_t vocabulary_size() const;
};

PlantedCorpus make_planted_corpus(const PlantedSpec& spec);

/// Raw tweet text for topic `topic` carrying the given markers.
std::string planted_tweet(const PlantedCorpus& corpus, std::size_t topic,
                          const std::vector<std::string>& markers, std::uint64_t seed);

}  // namespace topicsent::testing
