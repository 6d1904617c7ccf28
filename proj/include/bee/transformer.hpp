#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>

#include "bee/encoder.hpp"

namespace bee {

struct TransformerConfig {
  int d_model = 64;
  int n_heads = 4;
  int n_layers = 2;
  int d_ff = 256;
  int max_pieces = 512;
  uint64_t seed = 1;
};

// Compact BERT-style encoder with loadable weights: byte-level wordpiece
// tokenization, learned token/position embeddings, post-LN blocks of
// multi-head self-attention and a GELU feed-forward. The weights file format
// is the adapter surface for weights exported offline from a pretrained
// model; absent a file, parameters are seeded randomly.
class TransformerEncoder : public Encoder {
 public:
  explicit TransformerEncoder(TransformerConfig cfg, std::vector<std::string> vocab = {});

  static std::unique_ptr<TransformerEncoder> from_weights_file(const std::string& path);
  void save_weights(const std::string& path);

  int dim() const override { return cfg_.d_model; }
  int max_len() const override { return cfg_.max_pieces; }
  const TransformerConfig& config() const { return cfg_; }
  const std::vector<std::string>& vocab() const { return vocab_; }

  // Greedy longest-match wordpiece split; "##" marks continuations. A token
  // with no vocabulary cover becomes a single [UNK] piece.
  std::pair<std::vector<int>, SubwordAlignment> tokenize(
      const std::vector<std::string>& tokens) const;

  EncoderOutput encode(const std::vector<std::string>& tokens,
                       const std::string& sentence_id = "") const override;
  EncoderOutput encode_train(const std::vector<std::string>& tokens,
                             const std::string& sentence_id = "") override;
  void backward(const Matrix& d_tokens) override;

  void set_trainable_scope(TrainScope scope) override { scope_ = scope; }
  TrainScope trainable_scope() const { return scope_; }
  std::vector<Param*> params() override;
  std::vector<Param*> trainable_params() override;

 private:
  struct Block {
    Param wq, wk, wv, wo;      // d x d
    Param bq, bk, bv, bo;      // 1 x d
    Param ln1_g, ln1_b;        // 1 x d
    Param wf1, bf1, wf2, bf2;  // d x dff, 1 x dff, dff x d, 1 x d
    Param ln2_g, ln2_b;        // 1 x d

    std::vector<Param*> all();
  };

  struct LnCache {
    Matrix xhat;
    std::vector<double> inv_std;
  };

  struct BlockCache {
    Matrix x_in;
    Matrix q, k, v;
    std::vector<Matrix> attn;  // per-head softmax, m x m
    Matrix attn_out;           // heads concatenated, m x d
    Matrix res1;
    LnCache ln1;
    Matrix x_mid;
    Matrix ff_pre;
    Matrix ff_act;
    Matrix res2;
    LnCache ln2;
  };

  Matrix forward_pieces(const std::vector<int>& piece_ids, std::vector<BlockCache>* caches) const;
  Matrix block_forward(const Block& b, const Matrix& x, BlockCache* cache) const;
  // Returns gradient wrt the block input; accumulates parameter grads when
  // train_params is true.
  Matrix block_backward(Block& b, const BlockCache& cache, const Matrix& d_out, bool train_params);

  TransformerConfig cfg_;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> piece_ids_;
  int unk_id_ = 0;
  size_t max_piece_chars_ = 1;

  Param tok_emb_;  // V x d
  Param pos_emb_;  // max_pieces x d
  std::vector<Block> blocks_;
  TrainScope scope_ = TrainScope::heads_only;

  // training cache
  std::vector<int> cached_pieces_;
  SubwordAlignment cached_alignment_;
  std::vector<BlockCache> cached_blocks_;
};

// Default byte-level vocabulary: [UNK], every single byte, and every "##"
// continuation byte. Covers any token exactly.
std::vector<std::string> byte_level_vocab();

}  // namespace bee
