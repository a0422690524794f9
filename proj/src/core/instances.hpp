#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/catalog.hpp"
#include "core/common.hpp"
#include "core/config.hpp"
#include "core/corpus.hpp"

namespace redial {

enum class Role { seeker, recommender };

std::string to_string(Role role);

// One merged utterance: consecutive messages from the same speaker joined
// into a single text, mention ids resolved to numeric item ids.
struct Turn {
  Role role = Role::seeker;
  std::string text;
  std::vector<std::int64_t> mentions;            // in order of occurrence
  std::vector<std::int64_t> source_message_ids;

  bool operator==(const Turn&) const = default;
};

struct EvaluationInstance {
  std::string instance_id;   // "<conversation_id>#<turn_index>"
  std::string dialogue_id;
  int turn_index = 0;        // index of the target recommender turn
  std::vector<Turn> context; // all turns strictly before the target turn
  std::vector<std::int64_t> ground_truth;          // duplicate-free, first occurrence order
  std::vector<std::int64_t> dropped_ground_truth;  // removed by deduplication
  Variant variant = Variant::standard;
};

struct SeekerForm {
  TriState seen = TriState::did_not_say;
  TriState liked = TriState::did_not_say;
};

// Per-dialogue facts the scorer needs beyond the instances themselves:
// turn counts for the RDL denominator, seeker forms for rewards, titles
// for catalog masking.
struct DialogueMeta {
  std::string dialogue_id;
  int merged_turns = 0;
  int recommender_turns = 0;
  std::map<std::int64_t, SeekerForm> seeker_forms;
  std::map<std::int64_t, std::string> titles;
};

struct DropRecord {
  std::string instance_id;
  std::vector<std::int64_t> removed;
  bool instance_dropped = false;  // true when deduplication emptied the ground truth
};

struct InstanceSet {
  Variant variant = Variant::standard;
  std::vector<EvaluationInstance> instances;   // corpus order, then turn index
  std::vector<DialogueMeta> dialogue_meta;     // corpus order
  std::vector<DropRecord> drop_log;            // filled by deduplicate()
  std::uint64_t fingerprint = 0;               // config fingerprint once written/read
  bool has_meta = false;
  std::map<std::string, std::size_t> meta_index;

  const DialogueMeta* find_meta(const std::string& dialogue_id) const;
  void index_meta();
};

// Role assignment: initiator = seeker, respondent = recommender. Consecutive
// same-sender messages are joined with a single space; adjacent turns never
// share a role.
std::vector<Turn> merge_turns(const RawDialogue& dialogue);

// One instance per recommender turn that mentions at least one movie and has
// at least one preceding turn. Ground truth keeps first-occurrence order.
std::vector<EvaluationInstance> build_instances(const std::vector<Turn>& turns,
                                                const RawDialogue& dialogue,
                                                const Config& config);

// Full standard variant over a corpus, dialogue metadata included.
InstanceSet build_standard(const Corpus& corpus, const Config& config);

// Moves ground-truth items that already appear among the context mentions to
// dropped_ground_truth; returns nothing when the remainder is empty.
std::optional<EvaluationInstance> deduplicate_instance(const EvaluationInstance& instance,
                                                       DropRecord* record = nullptr);

InstanceSet deduplicate(const InstanceSet& standard);

// Catalog masking: uncovered context mentions are removed from the mention
// lists (their tokens become the title text), uncovered ground-truth items
// become fresh negative ids, covered items map to canonical catalog ids.
EvaluationInstance mask_instance(const EvaluationInstance& instance, const ItemCatalog& catalog,
                                 NegativeIdAllocator& allocator, const DialogueMeta* meta);

InstanceSet apply_catalog_mask(const InstanceSet& set, const ItemCatalog& catalog,
                               NegativeIdAllocator& allocator);

// --- line-delimited instance / dialogue-meta files -------------------------

void write_instances_file(const InstanceSet& set, const std::string& path, const Config& config);
void write_dialogue_meta_file(const InstanceSet& set, const std::string& path, const Config& config);

// meta_path may be empty; the set then carries no dialogue metadata and RDL
// scoring will refuse to run.
InstanceSet read_instances_file(const std::string& instances_path, const std::string& meta_path);

}  // namespace redial
