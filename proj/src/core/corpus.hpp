#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/common.hpp"

namespace redial {

// no/yes/did_not_say, encoded 0/1/2 as in the questionnaire forms.
enum class TriState : int { no = 0, yes = 1, did_not_say = 2 };

struct MentionForm {
  TriState suggested = TriState::no;  // only no/yes occur in the release
  TriState seen = TriState::did_not_say;
  TriState liked = TriState::did_not_say;

  bool operator==(const MentionForm&) const = default;
};

struct RawMessage {
  std::int64_t message_id = 0;
  std::int64_t sender_worker_id = 0;
  std::string text;
  std::int64_t time_offset = 0;

  bool operator==(const RawMessage&) const = default;
};

// One seeker/recommender conversation. Mention ids stay opaque strings here;
// numeric interpretation is the catalog module's concern.
struct RawDialogue {
  std::string conversation_id;
  std::int64_t initiator_worker_id = 0;
  std::int64_t respondent_worker_id = 0;
  std::vector<RawMessage> messages;
  std::map<std::string, std::string> movie_mentions;       // mention_id -> title
  std::map<std::string, MentionForm> initiator_forms;      // seeker forms
  std::map<std::string, MentionForm> respondent_forms;     // recommender forms

  bool operator==(const RawDialogue&) const = default;
};

struct ParseError {
  std::size_t line = 0;  // 1-based line number in the source file
  std::string message;
};

struct Corpus {
  Split split = Split::test;
  std::vector<RawDialogue> dialogues;  // in file order
  std::vector<ParseError> errors;
};

// A "@<digits>" token: the digit run and its byte span in the utterance.
struct MentionSpan {
  std::string id;
  std::size_t begin = 0;
  std::size_t end = 0;  // one past the last byte of the token

  bool operator==(const MentionSpan&) const = default;
};

// Scans left to right for maximal "@<digits>" tokens. Pure; spans never
// overlap and are strictly increasing.
std::vector<MentionSpan> extract_mentions(std::string_view text);

// Parses one line of the release format. Throws RedialError(parse) on
// malformed records; dialogues with zero messages are rejected here.
RawDialogue parse_dialogue_record(const std::string& line);

// Line-delimited corpus file, one dialogue per line. Malformed lines land in
// Corpus::errors with their line number; order equals file order regardless
// of internal parallelism.
Corpus parse_corpus(const std::string& path, Split split);

// Inverse of parse_dialogue_record up to JSON key order; parse(serialize(d)) == d.
std::string serialize_dialogue(const RawDialogue& dialogue);

enum class IssueCode {
  dangling_mention,   // "@id" in text without a movie_mentions entry
  unused_mention,     // movie_mentions entry never used in any message
  unknown_sender,     // message from a worker id that is neither participant
  empty_message,      // message with empty text
};

std::string to_string(IssueCode code);

struct Issue {
  IssueCode code;
  std::string detail;  // the offending mention id / message id
};

using ValidationReport = std::vector<Issue>;

// Pure check, never mutates; an empty report means a well-formed dialogue.
ValidationReport validate_dialogue(const RawDialogue& dialogue);

// Issue counts keyed by issue-code name, across the whole corpus.
std::map<std::string, std::size_t> issue_histogram(const Corpus& corpus);

// Removes dialogues with a non-empty validation report. Returns how many
// were dropped. Used by --strict-validation.
std::size_t drop_invalid_dialogues(Corpus& corpus);

}  // namespace redial
