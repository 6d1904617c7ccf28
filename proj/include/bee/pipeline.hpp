#pragma once

#include "bee/checkpoint.hpp"

namespace bee {

// One data split with its per-sentence dependency graphs. Graphs stay empty
// (all nullopt) when want_graphs is false — parse files are then never read.
struct LoadedSplit {
  std::vector<Sentence> sentences;
  std::vector<std::optional<DepGraph>> graphs;
};

// corpus_path: JSON-lines corpus. parse_path: optional CoNLL-U file aligned
// by sentence order; inline dep_edges in the corpus take precedence. In graph
// mode a sentence with neither -> ParseError before any training step.
LoadedSplit load_split(const std::string& corpus_path, const std::string& parse_path,
                       bool want_graphs);

struct TrainOutput {
  Checkpoint best;  // parameters of the best-dev-total epoch
  std::vector<EpochMetrics> history;
};

// Per-epoch loop: forward/backward per sentence, Adam step per batch,
// dev evaluation, metrics.json rewrite. Dev falls back to the training split
// when data.dev is empty. With epochs = 0 the checkpoint is the untouched
// initialization and the history is empty.
TrainOutput train(const RunConfig& cfg);
TrainOutput train_model(Model& m, const RunConfig& cfg);

// GNN-model initialization from a no-graph checkpoint: encoder, MLP and head
// parameters are copied; GCN parameters are freshly seeded from cfg.seed.
// Source trained with gnn enabled, or dimension mismatch -> IncompatibilityError.
Model init_from(const Checkpoint& src, const RunConfig& cfg);

MetricsReport evaluate_model(const Model& m, const LoadedSplit& split,
                             double* max_softmax_dev = nullptr);
MetricsReport evaluate_checkpoint(const Checkpoint& ckpt, const std::string& data_path,
                                  const std::string& parse_path = "");

struct AblationResult {
  MetricsReport no_graph;
  MetricsReport with_graph;
};

// Trains the no-graph model, initializes the graph model from it, trains
// that, evaluates both on the test split (falling back dev -> train), and
// writes report.md plus per-variant metrics.json, checkpoints and .a2 dumps
// under cfg.output_dir.
AblationResult ablate(const RunConfig& cfg);

// Two-row table: BioBert-BEE (no graph) and BioBert-GNN-BEE (with graph),
// columns TI, TC, AI, AC (F1) and total.
std::string ablation_report_markdown(const AblationResult& r);

// One .a2 file per document under dir, named <doc_id>.a2.
void dump_a2(const std::vector<Sentence>& predictions, const std::string& dir);

}  // namespace bee
