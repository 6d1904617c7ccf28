#pragma once

#include <memory>
#include <optional>

#include "bee/assembler.hpp"
#include "bee/config.hpp"
#include "bee/corpus.hpp"
#include "bee/depgraph.hpp"
#include "bee/encoder.hpp"
#include "bee/graphembed.hpp"
#include "bee/heads.hpp"

namespace bee {

// Everything trainable plus the vocabularies needed to interpret outputs.
struct Model {
  std::unique_ptr<Encoder> encoder;
  bool gnn_enabled = true;
  GcnParams gcn;
  HeadDepParams mlps;
  TagHeadParams tag_head;
  PairHeadParams pair_head;
  TypeInventory inventory;
  std::vector<std::string> tag_vocab;
  std::vector<std::string> role_vocab;

  // token representation width fed to the heads
  int rep_dim() const { return gnn_enabled ? gcn.out_dim() : encoder->dim(); }
  std::vector<Param*> core_params();  // GCN (if enabled) + MLPs + heads
  std::vector<Param*> all_params();   // encoder params + core
};

// Seeded construction: encoder, GCN, MLPs and heads each draw from an
// independent stream forked off cfg.seed. encoder_vocab, when given,
// overrides the default wordpiece vocabulary of a fresh pretrained encoder
// (checkpoint restore path).
Model build_model(const RunConfig& cfg, const TypeInventory& inv,
                  const std::vector<std::string>* encoder_vocab = nullptr);

struct SentenceLoss {
  double tag = 0.0;
  double pair = 0.0;
};

// Forward and backward for one sentence, accumulating parameter gradients.
// Training pairs come from gold triggers; tag targets from encode_tags.
// Returns the per-sentence mean losses (pair = 0 when no candidate pairs).
SentenceLoss train_step_sentence(Model& m, const Sentence& s, const DepGraph* g, double lambda);

// Full inference: predicted triggers feed pair classification; no gold is
// read. graphs[i] must be present when gnn is enabled. max_softmax_dev, when
// given, receives the largest |row sum - 1| over every emitted distribution.
std::vector<Sentence> predict(const Model& m, const std::vector<Sentence>& corpus,
                              const std::vector<std::optional<DepGraph>>& graphs,
                              double* max_softmax_dev = nullptr);

}  // namespace bee
