#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace bee {

// Flat `key = value` run configuration; see parse_config for the key list.
struct RunConfig {
  // data
  std::string train_path, dev_path, test_path;
  std::string train_parses, dev_parses, test_parses;
  // encoder
  std::string encoder_kind = "toy";  // toy | pretrained
  std::string encoder_model_name;    // weights file for the pretrained kind
  std::string train_scope = "heads_only";
  int encoder_max_len = 512;
  int encoder_dim = 64;
  int encoder_n_heads = 4;
  int encoder_n_layers = 2;
  int encoder_ff_dim = 256;
  // gnn
  bool gnn_enabled = true;
  int gnn_hidden_dim = 64;  // width of both GCN layers
  // mlp
  int mlp_hidden_dim = 64;
  int mlp_out_dim = 32;
  // head
  std::string head_mode = "concat";
  // train
  double lr = 1e-3;
  double encoder_lr = 1e-5;
  int epochs = 10;
  int batch_size = 1;
  double lambda = 1.0;

  uint64_t seed = 7;
  std::string output_dir = "out";
};

// Lines of `key = value`; blank lines and lines starting with '#' are
// skipped. Unknown key, bad value, or missing '=' -> ParseError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Key/value snapshot of every field (the same keys parse_config accepts).
std::map<std::string, std::string> config_to_map(const RunConfig& cfg);
RunConfig config_from_map(const std::map<std::string, std::string>& entries);

}  // namespace bee
