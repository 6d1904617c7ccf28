#pragma once

#include "bee/corpus.hpp"
#include "bee/matrix.hpp"

namespace bee {

// A classified (trigger, argument) pair that survived the NONE filter.
struct PredictedEdge {
  std::string head_mention;  // trigger id
  std::string dep_mention;   // entity or trigger id
  std::string role;          // never NONE
  double confidence = 0.0;   // probability of the chosen role

  bool operator==(const PredictedEdge& o) const = default;
};

// Maximal B-t (I-t)* runs become mentions; an orphan I-t opens a run as if it
// were B-t. Mention kind comes from the inventory; ids are M0, M1, ... in span
// order. Unknown tag or type -> DecodeError.
std::vector<Mention> decode_bio(const std::vector<std::string>& tags, const TypeInventory& inv);

// Argmax per row (ties -> lowest index) against tag_vocab, then decode.
std::vector<Mention> decode_bio(const Matrix& tag_probs,
                                const std::vector<std::string>& tag_vocab,
                                const TypeInventory& inv);

// One EventStructure per trigger with >= 1 surviving edge, in trigger input
// order; args keep edge input order. Directed cycles among trigger->trigger
// edges are broken by repeatedly deleting the lowest-confidence cycle edge
// (ties: lexicographic head id, dep id, role). Edge head that is not a
// trigger -> ContractViolation.
std::vector<EventStructure> assemble_events(const std::vector<Mention>& triggers,
                                            const std::vector<PredictedEdge>& edges);

}  // namespace bee
