#pragma once

#include <map>

#include "bee/model.hpp"
#include "bee/scorer.hpp"

namespace bee {

struct EpochMetrics {
  int epoch = 0;
  double tag_loss = 0.0;
  double pair_loss = 0.0;
  double loss = 0.0;  // tag_loss + lambda * pair_loss
  MetricsReport dev;
};

// Full model state: config snapshot, vocabularies, metric history and every
// parameter tensor by name. save -> load round-trips parameters bit-exactly
// (raw little-endian doubles).
struct Checkpoint {
  std::map<std::string, std::string> config;  // same keys as the config file
  TypeInventory inventory;
  std::vector<std::string> tag_vocab, role_vocab;
  std::vector<std::string> encoder_vocab;  // pretrained kind only
  int epoch = 0;
  std::vector<EpochMetrics> history;
  std::vector<std::pair<std::string, Matrix>> tensors;  // deterministic order
};

// Pretty-printed JSON array, one object per epoch (the metrics.json payload).
std::string metrics_history_to_json(const std::vector<EpochMetrics>& history);

Checkpoint make_checkpoint(Model& m, const RunConfig& cfg, int epoch,
                           const std::vector<EpochMetrics>& history);

void save_checkpoint(const Checkpoint& c, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// Rebuilds the model and overwrites every parameter from the checkpoint.
// Missing or misshapen tensors -> IncompatibilityError.
Model model_from_checkpoint(const Checkpoint& c);

}  // namespace bee
