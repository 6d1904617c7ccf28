#pragma once

#include <string>
#include <vector>

#include "bee/corpus.hpp"
#include "bee/depgraph.hpp"
#include "bee/rng.hpp"

// Synthetic corpora for the training harnesses and the scorer oracle.

namespace bee::synth {

struct SynthCorpus {
  std::vector<Sentence> sentences;
  std::vector<std::vector<DepEdge>> edges;  // aligned with sentences
};

// Memorization corpus: 4 entity types, 3 trigger types, 3 roles. Each
// sentence is [filler, trigger, filler, entity] with a star parse around the
// trigger; the gold role is a fixed function of the entity type.
SynthCorpus overfit_corpus(int n_sentences = 20);

// Graph-determined corpus: one trigger and three single-token entities per
// sentence, exactly one entity directly attached to the trigger in the parse
// (gold role Theme); the other two sit three hops away behind filler chains.
// Unit order and word choice are seeded independently of the attachment, so
// the surface text carries no signal about which entity is the Theme.
SynthCorpus ablation_corpus(int n_sentences, uint64_t seed);

// JSON-lines with inline dep_edges.
void write_jsonl(const SynthCorpus& c, const std::string& path);

// Random gold/pred sentence pairs for scorer testing: <= 5 mentions,
// <= 3 events, predictions perturbed from gold so partial matches occur.
struct ScorerInstance {
  Sentence gold;
  Sentence pred;
};

ScorerInstance random_scorer_instance(Rng& rng);

// Tokens "w0 w1 ..." with consistent char spans.
std::vector<Token> make_tokens(const std::vector<std::string>& words);

}  // namespace bee::synth
