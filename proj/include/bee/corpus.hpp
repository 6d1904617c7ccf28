#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bee/errors.hpp"

namespace bee {

struct Token {
  int index = 0;  // 0-based position in sentence
  std::string text;
  int char_start = 0;  // document offsets, end-exclusive
  int char_end = 0;
  bool operator==(const Token& o) const = default;
};

enum class MentionKind { entity, trigger };

struct Mention {
  std::string id;
  MentionKind kind = MentionKind::entity;
  std::string label;    // type string, e.g. Phosphorylation, Protein
  int token_start = 0;  // inclusive
  int token_end = 0;    // inclusive

  int length() const { return token_end - token_start + 1; }
  bool operator==(const Mention& o) const = default;
};

struct EventArg {
  std::string role;
  std::string arg_id;  // Mention id; may be another event's trigger (nesting)
  bool operator==(const EventArg& o) const = default;
};

struct EventStructure {
  std::string trigger_id;  // Mention id, kind must be trigger
  std::vector<EventArg> args;
  bool operator==(const EventStructure& o) const = default;
};

struct Sentence {
  std::string doc_id;
  std::vector<Token> tokens;
  std::vector<Mention> mentions;
  std::vector<EventStructure> events;

  int size() const { return static_cast<int>(tokens.size()); }
  const Mention* find_mention(const std::string& id) const;
  std::vector<Mention> entities() const;
  std::vector<Mention> triggers() const;
  bool operator==(const Sentence& o) const = default;
};

struct TagSequence {
  std::vector<std::string> tags;  // "O" or "B-<type>" / "I-<type>"
  int dropped_mentions = 0;       // overlapping mentions removed by the tie-break
};

struct CandidatePair {
  std::string head_mention;  // trigger id
  std::string dep_mention;   // entity or trigger id
  std::string gold_role;     // role string, or NONE_ROLE
};

inline constexpr const char* NONE_ROLE = "NONE";

// Joint BIO encoding over entity and trigger types. Overlapping mentions are
// resolved deterministically: longer span wins, equal length keeps the entity;
// the number of dropped mentions is reported on the TagSequence.
TagSequence encode_tags(const Sentence& s);

// One pair per (trigger, other mention), other != self, in (head span, dep span)
// order. gold_role comes from s.events, NONE_ROLE otherwise.
std::vector<CandidatePair> generate_candidate_pairs(const Sentence& s,
                                                    const std::vector<Mention>& triggers,
                                                    const std::vector<Mention>& mentions);

// Type inventories observed in a corpus, used to build tag/role vocabularies
// and to classify decoded spans back into entity vs trigger.
struct TypeInventory {
  std::vector<std::string> entity_types;
  std::vector<std::string> trigger_types;
  std::vector<std::string> roles;  // without NONE

  bool is_entity_type(const std::string& t) const;
  bool is_trigger_type(const std::string& t) const;
};

TypeInventory collect_inventory(const std::vector<Sentence>& corpus);

// BIO tag vocabulary: "O" first, then B-/I- per type, entities before triggers,
// each group in sorted order.
std::vector<std::string> build_tag_vocabulary(const TypeInventory& inv);

// Role vocabulary: NONE first, then roles in sorted order.
std::vector<std::string> build_role_vocabulary(const TypeInventory& inv);

}  // namespace bee
