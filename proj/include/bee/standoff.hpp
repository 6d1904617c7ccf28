#pragma once

#include <string>
#include <vector>

#include "bee/corpus.hpp"

namespace bee {

struct StandoffStats {
  int dropped_cross_sentence_events = 0;
};

// BioNLP standoff ingestion. txt is the document text, a1 holds entity
// T-lines, a2 holds trigger T-lines and event E-lines. Sentences split on
// `boundaries` (character ranges) when given, else on newlines; tokens split
// on whitespace. Every T span must land exactly on token boundaries.
std::vector<Sentence> load_standoff(const std::string& txt, const std::string& a1,
                                    const std::string& a2, const std::string& doc_id = "doc",
                                    const std::vector<std::pair<int, int>>& boundaries = {},
                                    StandoffStats* stats = nullptr);

// Serialization back to standoff. Offsets come from the token char spans, so
// a load/write round trip preserves mention offsets bit-exactly. Mentions and
// events are renumbered T1.., E1.. in sentence order; argument ids that are
// triggers of emitted events are written as E-references.
std::string write_a1(const std::vector<Sentence>& doc_sentences);
std::string write_a2(const std::vector<Sentence>& doc_sentences);

}  // namespace bee
