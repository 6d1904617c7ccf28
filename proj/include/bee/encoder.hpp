#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bee/errors.hpp"
#include "bee/matrix.hpp"
#include "bee/param.hpp"

namespace bee {

struct EncoderOutput {
  Matrix vectors;  // one row per token
};

// Which subword pieces each token spans; piece lists are non-empty, disjoint
// and ordered.
struct SubwordAlignment {
  std::vector<std::vector<int>> pieces_per_token;
};

enum class TrainScope { heads_only, last_encoder_layer_plus_heads, all };

TrainScope train_scope_from_string(const std::string& s);
std::string to_string(TrainScope scope);

// Token vector = vector of its first subword piece.
EncoderOutput pool_subwords(const Matrix& piece_vectors, const SubwordAlignment& alignment);

// Contextual token encoder behind a pluggable interface. encode() is a pure
// forward pass; encode_train() additionally caches activations for the
// following backward() call.
class Encoder {
 public:
  virtual ~Encoder() = default;

  virtual int dim() const = 0;
  virtual int max_len() const = 0;

  virtual EncoderOutput encode(const std::vector<std::string>& tokens,
                               const std::string& sentence_id = "") const = 0;
  virtual EncoderOutput encode_train(const std::vector<std::string>& tokens,
                                     const std::string& sentence_id = "") = 0;
  // d_tokens: gradient wrt the encoder output of the last encode_train call.
  virtual void backward(const Matrix& d_tokens) = 0;

  virtual void set_trainable_scope(TrainScope scope) = 0;
  virtual std::vector<Param*> params() = 0;            // every parameter group
  virtual std::vector<Param*> trainable_params() = 0;  // groups under the active scope
};

// Deterministic hash-seeded embedding mixed with a sinusoidal position code.
// A pure function of (token string, position, seed); no trainable parameters.
// Exists so the full pipeline runs offline with no pretrained weights.
class ToyEncoder : public Encoder {
 public:
  ToyEncoder(int dim = 64, int max_len = 512, uint64_t seed = 0);

  int dim() const override { return dim_; }
  int max_len() const override { return max_len_; }

  EncoderOutput encode(const std::vector<std::string>& tokens,
                       const std::string& sentence_id = "") const override;
  EncoderOutput encode_train(const std::vector<std::string>& tokens,
                             const std::string& sentence_id = "") override {
    return encode(tokens, sentence_id);
  }
  void backward(const Matrix&) override {}

  void set_trainable_scope(TrainScope) override {}
  std::vector<Param*> params() override { return {}; }
  std::vector<Param*> trainable_params() override { return {}; }

 private:
  int dim_;
  int max_len_;
  uint64_t seed_;
};

void check_sequence_length(int n, int max_len, const std::string& sentence_id);

}  // namespace bee
