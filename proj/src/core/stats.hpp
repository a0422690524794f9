#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/corpus.hpp"
#include "core/instances.hpp"

namespace redial {

// Descriptive counts for one split. The promoted mention counters are the
// ground-truth-occurrence ones; the raw-token and mention-map counters are
// kept as diagnostics because the exact counting rule behind published
// tables is not self-evident.
struct SplitStats {
  std::string name;
  std::size_t conversations = 0;
  std::size_t rec_instances = 0;
  std::size_t movie_mentions = 0;        // ground-truth occurrences over instances
  std::size_t unique_movies = 0;         // distinct ground-truth items
  std::size_t raw_token_mentions = 0;    // "@id" occurrences in all messages
  std::size_t unique_token_movies = 0;   // distinct ids among raw tokens
  std::size_t mention_map_entries = 0;   // sum of |movieMentions| per dialogue
  std::size_t unique_map_movies = 0;     // distinct movieMentions keys
};

struct StatsTable {
  std::vector<SplitStats> rows;  // one per supplied split
  SplitStats total;              // unique counts are cross-split distinct, not sums
  double test_repetition_rate = -1.0;  // < 0 when no test split was supplied
};

// Fraction of instances whose ground truth intersects the context mentions.
double repetition_rate(const InstanceSet& standard);

// Either corpus pointer may be null; instances are built internally with the
// supplied config so the counts match what `build` would emit.
StatsTable corpus_stats(const Corpus* train, const Corpus* test, const Config& config);

std::string stats_csv(const StatsTable& table);
std::string stats_text(const StatsTable& table);

}  // namespace redial
