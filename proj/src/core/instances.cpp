#include "core/instances.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace redial {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string to_string(Role role) { return role == Role::seeker ? "seeker" : "recommender"; }

namespace {

Role role_from_string(const std::string& s) {
  if (s == "seeker") return Role::seeker;
  if (s == "recommender") return Role::recommender;
  throw RedialError(ErrorCode::parse, "unknown role: " + s);
}

}  // namespace

const DialogueMeta* InstanceSet::find_meta(const std::string& dialogue_id) const {
  auto it = meta_index.find(dialogue_id);
  if (it == meta_index.end()) return nullptr;
  return &dialogue_meta[it->second];
}

void InstanceSet::index_meta() {
  meta_index.clear();
  for (std::size_t i = 0; i < dialogue_meta.size(); ++i) {
    meta_index.emplace(dialogue_meta[i].dialogue_id, i);
  }
}

std::vector<Turn> merge_turns(const RawDialogue& dialogue) {
  std::vector<Turn> turns;
  for (const RawMessage& message : dialogue.messages) {
    Role role = message.sender_worker_id == dialogue.initiator_worker_id ? Role::seeker
                                                                         : Role::recommender;
    if (turns.empty() || turns.back().role != role) {
      turns.push_back(Turn{role, {}, {}, {}});
    }
    Turn& turn = turns.back();
    if (!message.text.empty()) {
      if (!turn.text.empty()) turn.text += ' ';
      turn.text += message.text;
    }
    turn.source_message_ids.push_back(message.message_id);
  }
  // The joining space means tokens never form across message boundaries, so
  // extracting from the merged text equals concatenating per-message scans.
  for (Turn& turn : turns) {
    for (const MentionSpan& span : extract_mentions(turn.text)) {
      if (auto id = try_parse_item_id(span.id)) turn.mentions.push_back(*id);
    }
  }
  return turns;
}

namespace {

// suggested-only ground truth: the recommender's form decides, falling back
// to the seeker's form when the recommender never filled one.
bool is_suggested(std::int64_t item, const std::map<std::int64_t, TriState>& respondent,
                  const std::map<std::int64_t, TriState>& initiator) {
  if (auto it = respondent.find(item); it != respondent.end()) return it->second == TriState::yes;
  if (auto it = initiator.find(item); it != initiator.end()) return it->second == TriState::yes;
  return false;
}

std::map<std::int64_t, TriState> suggested_by_item(const std::map<std::string, MentionForm>& forms) {
  std::map<std::int64_t, TriState> out;
  for (const auto& [key, form] : forms) {
    if (auto id = try_parse_item_id(key)) out.emplace(*id, form.suggested);
  }
  return out;
}

}  // namespace

std::vector<EvaluationInstance> build_instances(const std::vector<Turn>& turns,
                                                const RawDialogue& dialogue,
                                                const Config& config) {
  const bool suggested_only = config.gt_mode == "suggested-only";
  std::map<std::int64_t, TriState> respondent_suggested;
  std::map<std::int64_t, TriState> initiator_suggested;
  if (suggested_only) {
    respondent_suggested = suggested_by_item(dialogue.respondent_forms);
    initiator_suggested = suggested_by_item(dialogue.initiator_forms);
  }

  std::vector<EvaluationInstance> instances;
  for (std::size_t ti = 1; ti < turns.size(); ++ti) {
    const Turn& turn = turns[ti];
    if (turn.role != Role::recommender || turn.mentions.empty()) continue;

    std::vector<std::int64_t> ground_truth;
    std::set<std::int64_t> seen;
    for (std::int64_t item : turn.mentions) {
      if (!seen.insert(item).second) continue;  // ground truth is a set
      if (suggested_only && !is_suggested(item, respondent_suggested, initiator_suggested)) continue;
      ground_truth.push_back(item);
    }
    if (ground_truth.empty()) continue;

    EvaluationInstance instance;
    instance.instance_id = dialogue.conversation_id + "#" + std::to_string(ti);
    instance.dialogue_id = dialogue.conversation_id;
    instance.turn_index = static_cast<int>(ti);
    instance.context.assign(turns.begin(), turns.begin() + static_cast<std::ptrdiff_t>(ti));
    instance.ground_truth = std::move(ground_truth);
    instance.variant = Variant::standard;
    instances.push_back(std::move(instance));
  }
  return instances;
}

InstanceSet build_standard(const Corpus& corpus, const Config& config) {
  InstanceSet set;
  set.variant = Variant::standard;
  for (const RawDialogue& dialogue : corpus.dialogues) {
    std::vector<Turn> turns = merge_turns(dialogue);
    std::vector<EvaluationInstance> instances = build_instances(turns, dialogue, config);
    if (instances.empty()) continue;

    DialogueMeta meta;
    meta.dialogue_id = dialogue.conversation_id;
    meta.merged_turns = static_cast<int>(turns.size());
    meta.recommender_turns = static_cast<int>(
        std::count_if(turns.begin(), turns.end(),
                      [](const Turn& t) { return t.role == Role::recommender; }));
    for (const auto& [key, form] : dialogue.initiator_forms) {
      if (auto id = try_parse_item_id(key)) {
        meta.seeker_forms.emplace(*id, SeekerForm{form.seen, form.liked});
      }
    }
    for (const auto& [key, title] : dialogue.movie_mentions) {
      if (auto id = try_parse_item_id(key)) meta.titles.emplace(*id, title);
    }
    set.dialogue_meta.push_back(std::move(meta));
    for (EvaluationInstance& instance : instances) set.instances.push_back(std::move(instance));
  }
  set.has_meta = true;
  set.index_meta();
  return set;
}

std::optional<EvaluationInstance> deduplicate_instance(const EvaluationInstance& instance,
                                                       DropRecord* record) {
  std::set<std::int64_t> context_items;
  for (const Turn& turn : instance.context) {
    context_items.insert(turn.mentions.begin(), turn.mentions.end());
  }

  EvaluationInstance out = instance;
  out.variant = Variant::dedup;
  out.ground_truth.clear();
  std::vector<std::int64_t> removed;
  for (std::int64_t item : instance.ground_truth) {
    if (context_items.count(item)) removed.push_back(item);
    else out.ground_truth.push_back(item);
  }
  out.dropped_ground_truth.insert(out.dropped_ground_truth.end(), removed.begin(), removed.end());

  if (record) {
    record->instance_id = instance.instance_id;
    record->removed = removed;
    record->instance_dropped = out.ground_truth.empty();
  }
  if (out.ground_truth.empty()) return std::nullopt;
  return out;
}

InstanceSet deduplicate(const InstanceSet& standard) {
  InstanceSet set;
  set.variant = Variant::dedup;
  set.dialogue_meta = standard.dialogue_meta;
  set.has_meta = standard.has_meta;
  for (const EvaluationInstance& instance : standard.instances) {
    DropRecord record;
    auto deduped = deduplicate_instance(instance, &record);
    if (!record.removed.empty() || record.instance_dropped) set.drop_log.push_back(record);
    if (deduped) set.instances.push_back(std::move(*deduped));
  }
  set.index_meta();
  return set;
}

namespace {

std::string mask_turn_text(const std::string& text, const ItemCatalog& catalog,
                           const DialogueMeta* meta) {
  std::string out;
  std::size_t cursor = 0;
  for (const MentionSpan& span : extract_mentions(text)) {
    out.append(text, cursor, span.begin - cursor);
    auto id = try_parse_item_id(span.id);
    if (!id) {
      out.append(text, span.begin, span.end - span.begin);
    } else if (catalog.covers(*id)) {
      out += '@';
      out += std::to_string(catalog.canonical(*id));
    } else {
      // Uncovered mention: keep the utterance natural by substituting the
      // title; unknown titles drop the token outright.
      std::string title;
      if (meta) {
        if (auto it = meta->titles.find(*id); it != meta->titles.end()) title = it->second;
      }
      out += title;
    }
    cursor = span.end;
  }
  out.append(text, cursor, text.size() - cursor);
  return out;
}

}  // namespace

EvaluationInstance mask_instance(const EvaluationInstance& instance, const ItemCatalog& catalog,
                                 NegativeIdAllocator& allocator, const DialogueMeta* meta) {
  EvaluationInstance out = instance;
  for (Turn& turn : out.context) {
    std::vector<std::int64_t> kept;
    for (std::int64_t item : turn.mentions) {
      if (catalog.covers(item)) kept.push_back(catalog.canonical(item));
    }
    turn.text = mask_turn_text(turn.text, catalog, meta);
    turn.mentions = std::move(kept);
  }
  for (std::int64_t& item : out.ground_truth) {
    if (item < 0) continue;  // already a masked miss
    item = catalog.covers(item) ? catalog.canonical(item) : allocator.allocate();
  }
  for (std::int64_t& item : out.dropped_ground_truth) {
    if (item >= 0 && catalog.covers(item)) item = catalog.canonical(item);
  }
  return out;
}

InstanceSet apply_catalog_mask(const InstanceSet& set, const ItemCatalog& catalog,
                               NegativeIdAllocator& allocator) {
  InstanceSet out;
  out.variant = set.variant;
  out.drop_log = set.drop_log;
  out.has_meta = set.has_meta;
  for (const DialogueMeta& meta : set.dialogue_meta) {
    DialogueMeta masked;
    masked.dialogue_id = meta.dialogue_id;
    masked.merged_turns = meta.merged_turns;
    masked.recommender_turns = meta.recommender_turns;
    for (const auto& [item, form] : meta.seeker_forms) {
      if (catalog.covers(item)) masked.seeker_forms.emplace(catalog.canonical(item), form);
    }
    for (const auto& [item, title] : meta.titles) {
      if (catalog.covers(item)) masked.titles.emplace(catalog.canonical(item), title);
    }
    out.dialogue_meta.push_back(std::move(masked));
  }
  out.index_meta();
  for (const EvaluationInstance& instance : set.instances) {
    out.instances.push_back(
        mask_instance(instance, catalog, allocator, set.find_meta(instance.dialogue_id)));
  }
  return out;
}

// --- file formats -----------------------------------------------------------

namespace {

ordered_json config_as_json(const Config& config) {
  ordered_json obj = ordered_json::object();
  for (const std::string& line : split_string(config.dump(), '\n')) {
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    obj[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return obj;
}

ordered_json instance_to_json(const EvaluationInstance& instance) {
  ordered_json record;
  record["instance_id"] = instance.instance_id;
  record["dialogue_id"] = instance.dialogue_id;
  record["variant"] = to_string(instance.variant);
  ordered_json context = ordered_json::array();
  for (const Turn& turn : instance.context) {
    context.push_back({{"role", to_string(turn.role)},
                       {"text", turn.text},
                       {"mentions", turn.mentions}});
  }
  record["context"] = std::move(context);
  record["ground_truth"] = instance.ground_truth;
  record["dropped_ground_truth"] = instance.dropped_ground_truth;
  return record;
}

EvaluationInstance instance_from_json(const json& record, std::size_t line_no) {
  auto fail = [&](const std::string& what) -> RedialError {
    return RedialError(ErrorCode::parse, "instance record at line " + std::to_string(line_no) + ": " + what);
  };
  EvaluationInstance instance;
  if (!record.contains("instance_id") || !record["instance_id"].is_string()) throw fail("missing instance_id");
  instance.instance_id = record["instance_id"].get<std::string>();
  if (!record.contains("dialogue_id") || !record["dialogue_id"].is_string()) throw fail("missing dialogue_id");
  instance.dialogue_id = record["dialogue_id"].get<std::string>();
  if (std::size_t hash = instance.instance_id.rfind('#'); hash != std::string::npos) {
    if (auto idx = try_parse_item_id(instance.instance_id.substr(hash + 1))) {
      instance.turn_index = static_cast<int>(*idx);
    }
  }
  instance.variant = variant_from_string(record.value("variant", "standard"));
  if (!record.contains("context") || !record["context"].is_array()) throw fail("missing context array");
  for (const json& turn_node : record["context"]) {
    Turn turn;
    turn.role = role_from_string(turn_node.value("role", ""));
    turn.text = turn_node.value("text", "");
    if (turn_node.contains("mentions")) {
      for (const json& m : turn_node["mentions"]) turn.mentions.push_back(m.get<std::int64_t>());
    }
    instance.context.push_back(std::move(turn));
  }
  if (instance.context.empty()) throw fail("context must not be empty");
  if (!record.contains("ground_truth") || !record["ground_truth"].is_array()) throw fail("missing ground_truth");
  for (const json& g : record["ground_truth"]) instance.ground_truth.push_back(g.get<std::int64_t>());
  if (instance.ground_truth.empty()) throw fail("ground_truth must not be empty");
  if (record.contains("dropped_ground_truth")) {
    for (const json& g : record["dropped_ground_truth"]) {
      instance.dropped_ground_truth.push_back(g.get<std::int64_t>());
    }
  }
  return instance;
}

}  // namespace

void write_instances_file(const InstanceSet& set, const std::string& path, const Config& config) {
  std::string out;
  ordered_json header;
  header["artifact"] = "instances";
  header["format"] = 1;
  header["variant"] = to_string(set.variant);
  header["count"] = set.instances.size();
  header["fingerprint"] = to_hex(config.fingerprint());
  header["config"] = config_as_json(config);
  out += header.dump();
  out += '\n';
  for (const EvaluationInstance& instance : set.instances) {
    out += instance_to_json(instance).dump();
    out += '\n';
  }
  write_text_file(path, out);
}

void write_dialogue_meta_file(const InstanceSet& set, const std::string& path, const Config& config) {
  std::string out;
  ordered_json header;
  header["artifact"] = "dialogues";
  header["format"] = 1;
  header["count"] = set.dialogue_meta.size();
  header["fingerprint"] = to_hex(config.fingerprint());
  header["config"] = config_as_json(config);
  out += header.dump();
  out += '\n';
  for (const DialogueMeta& meta : set.dialogue_meta) {
    ordered_json record;
    record["dialogue_id"] = meta.dialogue_id;
    record["merged_turns"] = meta.merged_turns;
    record["recommender_turns"] = meta.recommender_turns;
    ordered_json forms = ordered_json::object();
    for (const auto& [item, form] : meta.seeker_forms) {
      forms[std::to_string(item)] = {{"seen", static_cast<int>(form.seen)},
                                     {"liked", static_cast<int>(form.liked)}};
    }
    record["seeker_forms"] = std::move(forms);
    ordered_json titles = ordered_json::object();
    for (const auto& [item, title] : meta.titles) titles[std::to_string(item)] = title;
    record["titles"] = std::move(titles);
    out += record.dump();
    out += '\n';
  }
  write_text_file(path, out);
}

InstanceSet read_instances_file(const std::string& instances_path, const std::string& meta_path) {
  InstanceSet set;
  std::istringstream in(read_text_file(instances_path));
  std::string line;
  std::size_t line_no = 0;
  bool first_record = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw RedialError(ErrorCode::parse,
                        instances_path + ":" + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    if (first_record && record.is_object() && record.value("artifact", "") == "instances") {
      set.variant = variant_from_string(record.value("variant", "standard"));
      if (record.contains("fingerprint")) set.fingerprint = from_hex(record["fingerprint"].get<std::string>());
      first_record = false;
      continue;
    }
    first_record = false;
    set.instances.push_back(instance_from_json(record, line_no));
  }
  if (!set.instances.empty()) set.variant = set.instances.front().variant;

  if (!meta_path.empty()) {
    std::istringstream meta_in(read_text_file(meta_path));
    std::uint64_t meta_fingerprint = 0;
    line_no = 0;
    bool first_meta = true;
    while (std::getline(meta_in, line)) {
      ++line_no;
      if (line.empty()) continue;
      json record;
      try {
        record = json::parse(line);
      } catch (const json::exception& e) {
        throw RedialError(ErrorCode::parse,
                          meta_path + ":" + std::to_string(line_no) + ": invalid JSON: " + e.what());
      }
      if (first_meta && record.is_object() && record.value("artifact", "") == "dialogues") {
        if (record.contains("fingerprint")) meta_fingerprint = from_hex(record["fingerprint"].get<std::string>());
        first_meta = false;
        continue;
      }
      first_meta = false;
      DialogueMeta meta;
      meta.dialogue_id = record.value("dialogue_id", "");
      if (meta.dialogue_id.empty()) {
        throw RedialError(ErrorCode::parse, meta_path + ":" + std::to_string(line_no) + ": missing dialogue_id");
      }
      meta.merged_turns = record.value("merged_turns", 0);
      meta.recommender_turns = record.value("recommender_turns", 0);
      if (record.contains("seeker_forms")) {
        for (const auto& [key, node] : record["seeker_forms"].items()) {
          SeekerForm form;
          form.seen = static_cast<TriState>(node.value("seen", 2));
          form.liked = static_cast<TriState>(node.value("liked", 2));
          meta.seeker_forms.emplace(parse_item_id(key), form);
        }
      }
      if (record.contains("titles")) {
        for (const auto& [key, node] : record["titles"].items()) {
          meta.titles.emplace(parse_item_id(key), node.get<std::string>());
        }
      }
      set.dialogue_meta.push_back(std::move(meta));
    }
    if (set.fingerprint != 0 && meta_fingerprint != 0 && set.fingerprint != meta_fingerprint) {
      throw RedialError(ErrorCode::fingerprint_mismatch,
                        "instance file and dialogue file carry different fingerprints: " +
                            to_hex(set.fingerprint) + " vs " + to_hex(meta_fingerprint));
    }
    set.has_meta = true;
    set.index_meta();
  }
  return set;
}

}  // namespace redial
