#include "core/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <thread>
#include <variant>

#include <nlohmann/json.hpp>

namespace redial {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::vector<MentionSpan> extract_mentions(std::string_view text) {
  std::vector<MentionSpan> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '@') {
      ++i;
      continue;
    }
    std::size_t digits_begin = i + 1;
    std::size_t j = digits_begin;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    if (j > digits_begin) {
      out.push_back(MentionSpan{std::string(text.substr(digits_begin, j - digits_begin)), i, j});
      i = j;  // maximal run consumed; trailing alphanumerics stay in the text
    } else {
      ++i;
    }
  }
  return out;
}

namespace {

TriState tri_state_from_json(const json& value, const char* field, const std::string& mention_id) {
  if (!value.is_number_integer()) {
    throw RedialError(ErrorCode::parse,
                      std::string("form field ") + field + " for mention " + mention_id + " is not an integer");
  }
  int v = value.get<int>();
  if (v < 0 || v > 2) {
    throw RedialError(ErrorCode::parse,
                      std::string("form field ") + field + " for mention " + mention_id +
                          " out of range: " + std::to_string(v));
  }
  return static_cast<TriState>(v);
}

std::map<std::string, MentionForm> parse_forms(const json& node, const char* field_name) {
  std::map<std::string, MentionForm> out;
  if (node.is_null()) return out;
  // The release serializes empty maps as [] occasionally; tolerate that.
  if (node.is_array()) {
    if (!node.empty()) {
      throw RedialError(ErrorCode::parse, std::string(field_name) + " is a non-empty array, expected object");
    }
    return out;
  }
  if (!node.is_object()) {
    throw RedialError(ErrorCode::parse, std::string(field_name) + " must be an object");
  }
  for (const auto& [mention_id, form_node] : node.items()) {
    if (!form_node.is_object()) {
      throw RedialError(ErrorCode::parse, std::string(field_name) + " entry " + mention_id + " is not an object");
    }
    MentionForm form;
    if (form_node.contains("suggested")) form.suggested = tri_state_from_json(form_node["suggested"], "suggested", mention_id);
    if (form_node.contains("seen")) form.seen = tri_state_from_json(form_node["seen"], "seen", mention_id);
    if (form_node.contains("liked")) form.liked = tri_state_from_json(form_node["liked"], "liked", mention_id);
    out.emplace(mention_id, form);
  }
  return out;
}

std::map<std::string, std::string> parse_movie_mentions(const json& node) {
  std::map<std::string, std::string> out;
  if (node.is_null()) return out;
  if (node.is_array()) {
    if (!node.empty()) {
      throw RedialError(ErrorCode::parse, "movieMentions is a non-empty array, expected object");
    }
    return out;
  }
  if (!node.is_object()) throw RedialError(ErrorCode::parse, "movieMentions must be an object");
  for (const auto& [mention_id, title] : node.items()) {
    if (title.is_null()) out.emplace(mention_id, "");
    else if (title.is_string()) out.emplace(mention_id, title.get<std::string>());
    else throw RedialError(ErrorCode::parse, "movieMentions entry " + mention_id + " is not a string");
  }
  return out;
}

std::int64_t require_int(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_number_integer()) {
    throw RedialError(ErrorCode::parse, std::string("missing or non-integer field: ") + key);
  }
  return obj[key].get<std::int64_t>();
}

}  // namespace

RawDialogue parse_dialogue_record(const std::string& line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::exception& e) {
    throw RedialError(ErrorCode::parse, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw RedialError(ErrorCode::parse, "record is not a JSON object");

  RawDialogue d;
  if (!doc.contains("conversationId")) throw RedialError(ErrorCode::parse, "missing field: conversationId");
  const json& cid = doc["conversationId"];
  if (cid.is_string()) d.conversation_id = cid.get<std::string>();
  else if (cid.is_number_integer()) d.conversation_id = std::to_string(cid.get<std::int64_t>());
  else throw RedialError(ErrorCode::parse, "conversationId must be a string or integer");

  d.initiator_worker_id = require_int(doc, "initiatorWorkerId");
  d.respondent_worker_id = require_int(doc, "respondentWorkerId");
  if (d.initiator_worker_id == d.respondent_worker_id) {
    throw RedialError(ErrorCode::parse, "initiator and respondent worker ids are equal");
  }

  if (!doc.contains("messages") || !doc["messages"].is_array()) {
    throw RedialError(ErrorCode::parse, "missing or non-array field: messages");
  }
  for (const json& m : doc["messages"]) {
    if (!m.is_object()) throw RedialError(ErrorCode::parse, "message is not an object");
    RawMessage msg;
    msg.message_id = require_int(m, "messageId");
    msg.sender_worker_id = require_int(m, "senderWorkerId");
    msg.time_offset = m.contains("timeOffset") && m["timeOffset"].is_number_integer()
                          ? m["timeOffset"].get<std::int64_t>()
                          : 0;
    if (!m.contains("text") || !m["text"].is_string()) {
      throw RedialError(ErrorCode::parse, "message " + std::to_string(msg.message_id) + " has no text string");
    }
    msg.text = m["text"].get<std::string>();
    d.messages.push_back(std::move(msg));
  }
  if (d.messages.empty()) {
    // Zero-message dialogues can produce no instances and break turn merging.
    throw RedialError(ErrorCode::parse, "dialogue " + d.conversation_id + " has no messages");
  }

  d.movie_mentions = parse_movie_mentions(doc.value("movieMentions", json()));
  d.initiator_forms = parse_forms(doc.value("initiatorQuestions", json()), "initiatorQuestions");
  d.respondent_forms = parse_forms(doc.value("respondentQuestions", json()), "respondentQuestions");
  return d;
}

Corpus parse_corpus(const std::string& path, Split split) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RedialError(ErrorCode::io, "cannot open corpus file: " + path);

  std::vector<std::pair<std::size_t, std::string>> lines;  // (1-based line no, text)
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    lines.emplace_back(line_no, std::move(line));
    line.clear();
  }
  if (in.bad()) throw RedialError(ErrorCode::io, "error while reading corpus file: " + path);

  Corpus corpus;
  corpus.split = split;

  using Slot = std::variant<RawDialogue, ParseError>;
  std::vector<Slot> slots(lines.size());

  auto parse_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        slots[i] = parse_dialogue_record(lines[i].second);
      } catch (const RedialError& e) {
        slots[i] = ParseError{lines[i].first, e.what()};
      }
    }
  };

  int threads = effective_threads();
  if (threads <= 1 || lines.size() < 64) {
    parse_range(0, lines.size());
  } else {
    std::size_t n = lines.size();
    std::size_t chunk = (n + static_cast<std::size_t>(threads) - 1) / static_cast<std::size_t>(threads);
    std::vector<std::thread> workers;
    for (std::size_t begin = 0; begin < n; begin += chunk) {
      workers.emplace_back(parse_range, begin, std::min(begin + chunk, n));
    }
    for (std::thread& w : workers) w.join();
  }

  // Collect in input order; parallel schedule cannot change the result.
  for (Slot& slot : slots) {
    if (std::holds_alternative<RawDialogue>(slot)) {
      corpus.dialogues.push_back(std::move(std::get<RawDialogue>(slot)));
    } else {
      corpus.errors.push_back(std::move(std::get<ParseError>(slot)));
    }
  }
  return corpus;
}

std::string serialize_dialogue(const RawDialogue& dialogue) {
  ordered_json doc;
  doc["conversationId"] = dialogue.conversation_id;
  doc["initiatorWorkerId"] = dialogue.initiator_worker_id;
  doc["respondentWorkerId"] = dialogue.respondent_worker_id;
  ordered_json messages = ordered_json::array();
  for (const RawMessage& m : dialogue.messages) {
    messages.push_back({{"messageId", m.message_id},
                        {"text", m.text},
                        {"timeOffset", m.time_offset},
                        {"senderWorkerId", m.sender_worker_id}});
  }
  doc["messages"] = std::move(messages);
  ordered_json mentions = ordered_json::object();
  for (const auto& [id, title] : dialogue.movie_mentions) mentions[id] = title;
  doc["movieMentions"] = std::move(mentions);
  auto forms_to_json = [](const std::map<std::string, MentionForm>& forms) {
    ordered_json node = ordered_json::object();
    for (const auto& [id, form] : forms) {
      node[id] = {{"suggested", static_cast<int>(form.suggested)},
                  {"seen", static_cast<int>(form.seen)},
                  {"liked", static_cast<int>(form.liked)}};
    }
    return node;
  };
  doc["initiatorQuestions"] = forms_to_json(dialogue.initiator_forms);
  doc["respondentQuestions"] = forms_to_json(dialogue.respondent_forms);
  return doc.dump();
}

std::string to_string(IssueCode code) {
  switch (code) {
    case IssueCode::dangling_mention: return "dangling_mention";
    case IssueCode::unused_mention: return "unused_mention";
    case IssueCode::unknown_sender: return "unknown_sender";
    case IssueCode::empty_message: return "empty_message";
  }
  return "unknown";
}

ValidationReport validate_dialogue(const RawDialogue& dialogue) {
  ValidationReport report;
  std::set<std::string> used;
  for (const RawMessage& m : dialogue.messages) {
    if (m.text.empty()) {
      report.push_back({IssueCode::empty_message, std::to_string(m.message_id)});
    }
    if (m.sender_worker_id != dialogue.initiator_worker_id &&
        m.sender_worker_id != dialogue.respondent_worker_id) {
      report.push_back({IssueCode::unknown_sender, std::to_string(m.message_id)});
    }
    for (const MentionSpan& span : extract_mentions(m.text)) {
      used.insert(span.id);
      if (!dialogue.movie_mentions.count(span.id)) {
        report.push_back({IssueCode::dangling_mention, span.id});
      }
    }
  }
  for (const auto& [id, title] : dialogue.movie_mentions) {
    if (!used.count(id)) report.push_back({IssueCode::unused_mention, id});
  }
  return report;
}

std::map<std::string, std::size_t> issue_histogram(const Corpus& corpus) {
  std::map<std::string, std::size_t> histogram;
  for (const RawDialogue& d : corpus.dialogues) {
    for (const Issue& issue : validate_dialogue(d)) {
      ++histogram[to_string(issue.code)];
    }
  }
  return histogram;
}

std::size_t drop_invalid_dialogues(Corpus& corpus) {
  std::size_t before = corpus.dialogues.size();
  std::erase_if(corpus.dialogues, [](const RawDialogue& d) { return !validate_dialogue(d).empty(); });
  return before - corpus.dialogues.size();
}

}  // namespace redial
