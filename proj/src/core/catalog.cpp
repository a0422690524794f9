#include "core/catalog.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "core/instances.hpp"

namespace redial {

std::optional<std::int64_t> try_parse_item_id(const std::string& mention_id) {
  if (mention_id.empty()) return std::nullopt;
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(mention_id.data(), mention_id.data() + mention_id.size(), value);
  if (ec != std::errc() || ptr != mention_id.data() + mention_id.size() || value < 0) return std::nullopt;
  return value;
}

std::int64_t parse_item_id(const std::string& mention_id) {
  auto parsed = try_parse_item_id(mention_id);
  if (!parsed) {
    throw RedialError(ErrorCode::parse, "mention id is not a non-negative integer: " + mention_id);
  }
  return *parsed;
}

std::size_t ItemCatalog::distinct_canonical_count() const {
  std::set<std::int64_t> distinct;
  for (const auto& [mention, canonical] : entries) distinct.insert(canonical);
  return distinct.size();
}

ItemCatalog load_catalog(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RedialError(ErrorCode::io, "cannot open catalog file: " + path);

  ItemCatalog catalog;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (line.rfind("catalog_id=", 0) != 0) {
        throw RedialError(ErrorCode::parse, path + ":" + std::to_string(line_no) +
                                                ": expected header line catalog_id=<name>");
      }
      catalog.catalog_id = line.substr(std::string("catalog_id=").size());
      if (catalog.catalog_id.empty()) {
        throw RedialError(ErrorCode::parse, path + ": catalog_id must not be empty");
      }
      saw_header = true;
      continue;
    }
    std::string mention_part = line;
    std::string canonical_part;
    if (std::size_t comma = line.find(','); comma != std::string::npos) {
      mention_part = line.substr(0, comma);
      canonical_part = line.substr(comma + 1);
    }
    auto mention = try_parse_item_id(mention_part);
    if (!mention) {
      throw RedialError(ErrorCode::parse, path + ":" + std::to_string(line_no) +
                                              ": mention id is not a non-negative integer: " + mention_part);
    }
    std::int64_t canonical = *mention;  // bare rows map an id to itself
    if (!canonical_part.empty()) {
      auto parsed = try_parse_item_id(canonical_part);
      if (!parsed) {
        throw RedialError(ErrorCode::parse, path + ":" + std::to_string(line_no) +
                                                ": canonical id is not a non-negative integer: " + canonical_part);
      }
      canonical = *parsed;
    }
    if (catalog.entries.count(*mention)) {
      throw RedialError(ErrorCode::duplicate_id,
                        path + ": duplicate mention id " + std::to_string(*mention));
    }
    catalog.entries.emplace(*mention, canonical);
  }
  if (in.bad()) throw RedialError(ErrorCode::io, "error while reading catalog file: " + path);
  if (!saw_header) throw RedialError(ErrorCode::parse, path + ": missing catalog_id header line");
  return catalog;
}

CoverageReport compute_coverage(const InstanceSet& instances,
                                const std::set<std::int64_t>& corpus_items,
                                const ItemCatalog& catalog) {
  CoverageReport report;
  report.corpus_item_count = corpus_items.size();
  for (std::int64_t item : corpus_items) {
    if (catalog.covers(item)) ++report.covered_item_count;
  }
  report.items_pct = corpus_items.empty()
                         ? 0.0
                         : static_cast<double>(report.covered_item_count) /
                               static_cast<double>(report.corpus_item_count);

  report.instance_count = instances.instances.size();
  for (const EvaluationInstance& inst : instances.instances) {
    bool any_covered = false;
    for (std::int64_t item : inst.ground_truth) {
      if (item >= 0 && catalog.covers(item)) {
        any_covered = true;
        break;
      }
    }
    if (any_covered) ++report.evaluable_instance_count;
  }
  report.test_data_pct = report.instance_count == 0
                             ? 0.0
                             : static_cast<double>(report.evaluable_instance_count) /
                                   static_cast<double>(report.instance_count);
  // Negative-id masking keeps every instance scoreable, so the lenient rule
  // is 1.0 whenever there are instances at all.
  report.lenient_test_data_pct = report.instance_count == 0 ? 0.0 : 1.0;
  return report;
}

std::set<std::int64_t> corpus_item_ids(const Corpus& corpus) {
  std::set<std::int64_t> items;
  for (const RawDialogue& dialogue : corpus.dialogues) {
    for (const auto& [key, title] : dialogue.movie_mentions) {
      if (auto id = try_parse_item_id(key)) items.insert(*id);
    }
  }
  return items;
}

std::set<std::int64_t> instance_item_ids(const InstanceSet& instances) {
  std::set<std::int64_t> items;
  for (const EvaluationInstance& instance : instances.instances) {
    for (std::int64_t item : instance.ground_truth) {
      if (item >= 0) items.insert(item);
    }
    for (const Turn& turn : instance.context) {
      for (std::int64_t item : turn.mentions) {
        if (item >= 0) items.insert(item);
      }
    }
  }
  return items;
}

}  // namespace redial
