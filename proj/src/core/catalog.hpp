#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "core/common.hpp"

namespace redial {

struct InstanceSet;  // instances.hpp
struct Corpus;       // corpus.hpp

// Numeric interpretation of mention ids lives here. Throws on non-digit
// input or overflow.
std::int64_t parse_item_id(const std::string& mention_id);
std::optional<std::int64_t> try_parse_item_id(const std::string& mention_id);

// A method-specific set of resolvable items: mention id -> canonical item id.
// identity_all short-circuits lookup so the built-in "identity" catalog
// covers any id without enumerating the corpus.
struct ItemCatalog {
  std::string catalog_id;
  std::map<std::int64_t, std::int64_t> entries;
  bool identity_all = false;

  bool covers(std::int64_t item) const {
    return identity_all || entries.count(item) > 0;
  }
  // Precondition: covers(item).
  std::int64_t canonical(std::int64_t item) const {
    if (identity_all) return item;
    return entries.at(item);
  }
  std::size_t distinct_canonical_count() const;

  static ItemCatalog identity() {
    ItemCatalog cat;
    cat.catalog_id = "identity";
    cat.identity_all = true;
    return cat;
  }
};

// Catalog file: header line "catalog_id=<name>", then either
// "mention_id,canonical_id" CSV rows or bare "mention_id" lines (identity
// rows). Duplicate mention ids and non-integer values are errors.
ItemCatalog load_catalog(const std::string& path);

// Negative ids mark ground-truth items a method cannot resolve; they are
// guaranteed misses because predictions carry non-negative ids only.
class NegativeIdAllocator {
 public:
  std::int64_t allocate() { return next_--; }
  std::int64_t next() const { return next_; }

 private:
  std::int64_t next_ = -101;
};

struct CoverageReport {
  double items_pct = 0.0;       // |corpus items covered| / |corpus items|
  double test_data_pct = 0.0;   // instances with >= 1 covered ground-truth item
  double lenient_test_data_pct = 0.0;  // with negative-id masking every instance survives
  std::size_t corpus_item_count = 0;
  std::size_t covered_item_count = 0;
  std::size_t instance_count = 0;
  std::size_t evaluable_instance_count = 0;
};

CoverageReport compute_coverage(const InstanceSet& instances,
                                const std::set<std::int64_t>& corpus_items,
                                const ItemCatalog& catalog);

// Distinct parseable movieMentions ids across a corpus.
std::set<std::int64_t> corpus_item_ids(const Corpus& corpus);

// Distinct non-negative ids observed in an instance set (ground truth and
// context mentions). Fallback item universe when no corpus is at hand.
std::set<std::int64_t> instance_item_ids(const InstanceSet& instances);

}  // namespace redial
