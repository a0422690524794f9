#include "core/stats.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

namespace redial {

double repetition_rate(const InstanceSet& standard) {
  if (standard.instances.empty()) return 0.0;
  std::size_t overlapping = 0;
  for (const EvaluationInstance& instance : standard.instances) {
    std::set<std::int64_t> context_items;
    for (const Turn& turn : instance.context) {
      context_items.insert(turn.mentions.begin(), turn.mentions.end());
    }
    bool overlap = std::any_of(instance.ground_truth.begin(), instance.ground_truth.end(),
                               [&](std::int64_t item) { return context_items.count(item) > 0; });
    if (overlap) ++overlapping;
  }
  return static_cast<double>(overlapping) / static_cast<double>(standard.instances.size());
}

namespace {

SplitStats stats_for_split(const Corpus& corpus, const Config& config,
                           std::set<std::int64_t>* gt_items, std::set<std::string>* token_ids,
                           std::set<std::string>* map_ids, InstanceSet* standard_out) {
  SplitStats stats;
  stats.name = to_string(corpus.split);
  stats.conversations = corpus.dialogues.size();

  InstanceSet standard = build_standard(corpus, config);
  stats.rec_instances = standard.instances.size();
  for (const EvaluationInstance& instance : standard.instances) {
    stats.movie_mentions += instance.ground_truth.size();
    for (std::int64_t item : instance.ground_truth) gt_items->insert(item);
  }

  std::set<std::int64_t> split_gt;
  for (const EvaluationInstance& instance : standard.instances) {
    split_gt.insert(instance.ground_truth.begin(), instance.ground_truth.end());
  }
  stats.unique_movies = split_gt.size();

  std::set<std::string> split_tokens;
  std::set<std::string> split_map;
  for (const RawDialogue& dialogue : corpus.dialogues) {
    for (const RawMessage& message : dialogue.messages) {
      for (const MentionSpan& span : extract_mentions(message.text)) {
        ++stats.raw_token_mentions;
        split_tokens.insert(span.id);
        token_ids->insert(span.id);
      }
    }
    stats.mention_map_entries += dialogue.movie_mentions.size();
    for (const auto& [id, title] : dialogue.movie_mentions) {
      split_map.insert(id);
      map_ids->insert(id);
    }
  }
  stats.unique_token_movies = split_tokens.size();
  stats.unique_map_movies = split_map.size();

  if (standard_out) *standard_out = std::move(standard);
  return stats;
}

}  // namespace

StatsTable corpus_stats(const Corpus* train, const Corpus* test, const Config& config) {
  StatsTable table;
  std::set<std::int64_t> gt_items;
  std::set<std::string> token_ids;
  std::set<std::string> map_ids;

  if (train) {
    table.rows.push_back(stats_for_split(*train, config, &gt_items, &token_ids, &map_ids, nullptr));
  }
  if (test) {
    InstanceSet standard;
    table.rows.push_back(stats_for_split(*test, config, &gt_items, &token_ids, &map_ids, &standard));
    table.test_repetition_rate = repetition_rate(standard);
  }

  table.total.name = "total";
  for (const SplitStats& row : table.rows) {
    table.total.conversations += row.conversations;
    table.total.rec_instances += row.rec_instances;
    table.total.movie_mentions += row.movie_mentions;
    table.total.raw_token_mentions += row.raw_token_mentions;
    table.total.mention_map_entries += row.mention_map_entries;
  }
  table.total.unique_movies = gt_items.size();
  table.total.unique_token_movies = token_ids.size();
  table.total.unique_map_movies = map_ids.size();
  return table;
}

std::string stats_csv(const StatsTable& table) {
  std::string out =
      "split,conversations,rec_instances,movie_mentions,unique_movies,"
      "raw_token_mentions,unique_token_movies,mention_map_entries,unique_map_movies\n";
  auto row_csv = [](const SplitStats& row) {
    std::ostringstream line;
    line << row.name << ',' << row.conversations << ',' << row.rec_instances << ','
         << row.movie_mentions << ',' << row.unique_movies << ',' << row.raw_token_mentions << ','
         << row.unique_token_movies << ',' << row.mention_map_entries << ','
         << row.unique_map_movies << '\n';
    return line.str();
  };
  for (const SplitStats& row : table.rows) out += row_csv(row);
  out += row_csv(table.total);
  if (table.test_repetition_rate >= 0.0) {
    std::ostringstream line;
    line << "repetition_rate," << std::fixed << std::setprecision(6) << table.test_repetition_rate
         << ",,,,,,,\n";
    out += line.str();
  }
  return out;
}

std::string stats_text(const StatsTable& table) {
  std::ostringstream out;
  out << std::left << std::setw(8) << "split" << std::right << std::setw(10) << "#conv"
      << std::setw(12) << "#instances" << std::setw(12) << "#mentions" << std::setw(10)
      << "#unique" << '\n';
  auto row_text = [&out](const SplitStats& row) {
    out << std::left << std::setw(8) << row.name << std::right << std::setw(10) << row.conversations
        << std::setw(12) << row.rec_instances << std::setw(12) << row.movie_mentions
        << std::setw(10) << row.unique_movies << '\n';
  };
  for (const SplitStats& row : table.rows) row_text(row);
  row_text(table.total);
  if (table.test_repetition_rate >= 0.0) {
    out << "test repetition rate: " << std::fixed << std::setprecision(4)
        << table.test_repetition_rate << '\n';
  }
  return out.str();
}

}  // namespace redial
