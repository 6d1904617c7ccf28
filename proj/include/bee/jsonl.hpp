#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bee/corpus.hpp"
#include "bee/depgraph.hpp"

namespace bee {

// One JSON object per line:
//   {"doc_id": str, "tokens": [str], "char_spans": [[int,int]],
//    "entities": [{"id","label","start","end"}], "triggers": [...same...],
//    "events": [{"trigger_id", "args": [["role","id"]]}],
//    "dep_edges": [[head,dependent,"rel"]] }   // optional
// start/end are inclusive token indices.

std::vector<Sentence> load_json_corpus(const std::string& path);
std::vector<Sentence> parse_json_corpus(const std::string& text);

// Dependency edges carried inline by the corpus file, one entry per sentence;
// nullopt where the record has no "dep_edges" key.
std::vector<std::optional<std::vector<DepEdge>>> load_json_dep_edges(const std::string& path);
std::vector<std::optional<std::vector<DepEdge>>> parse_json_dep_edges(const std::string& text);

std::string sentence_to_json(const Sentence& s, const std::vector<DepEdge>* dep_edges = nullptr);
std::string serialize_json_corpus(const std::vector<Sentence>& corpus);
void save_json_corpus(const std::vector<Sentence>& corpus, const std::string& path);

}  // namespace bee
