#pragma once

#include "bee/depgraph.hpp"
#include "bee/encoder.hpp"
#include "bee/param.hpp"
#include "bee/rng.hpp"

namespace bee {

// Two-layer GCN weights. Widths chain encoder dim d -> d1 -> d2.
struct GcnParams {
  Param w1, b1;  // d x d1, 1 x d1
  Param w2, b2;  // d1 x d2, 1 x d2

  GcnParams() = default;
  GcnParams(int d, int d1, int d2, Rng& rng);

  std::vector<Param*> all();
  int out_dim() const { return w2.value.cols; }
};

// One-hidden-layer MLP: in -> m (ReLU) -> out (linear).
struct MlpParams {
  Param w1, b1;  // in x m, 1 x m
  Param w2, b2;  // m x out, 1 x out

  MlpParams() = default;
  MlpParams(const std::string& prefix, int in, int m, int out, Rng& rng);

  std::vector<Param*> all();
  int out_dim() const { return w2.value.cols; }
};

// The head and dependent networks applied after the GCN (or directly to the
// encoder output in no-graph mode). Independent parameters.
struct HeadDepParams {
  MlpParams mlp_h;
  MlpParams mlp_d;

  HeadDepParams() = default;
  HeadDepParams(int in, int m, int out, Rng& rng);

  std::vector<Param*> all();
};

struct GcnCache {
  bool bypass = false;
  Matrix ah0;  // A_norm * H0
  Matrix z1;   // ah0 * W1 + b1
  Matrix h1;   // ReLU(z1)
  Matrix ah1;  // A_norm * H1
  Matrix z2;   // ah1 * W2 + b2
};

struct MlpCache {
  Matrix x;   // input rows
  Matrix z1;  // x * W1 + b1
  Matrix h1;  // ReLU(z1)
};

// ReLU(A_norm * H * W). Shapes must chain or a ShapeError is thrown.
Matrix gcn_layer(const Matrix& h, const Matrix& a_norm, const Matrix& w);

// Two stacked GCN layers over g's normalized adjacency. When g is null
// (no-graph mode) the input is passed through unchanged, bit-exactly.
// Token-count mismatch between parse and sentence -> AlignmentError.
Matrix embed(const EncoderOutput& c, const DepGraph* g, const GcnParams& p,
             GcnCache* cache = nullptr);

// Gradient of a scalar loss wrt the embed input; accumulates parameter grads.
Matrix embed_backward(const Matrix& d_out, const DepGraph* g, GcnParams& p,
                      const GcnCache& cache);

Matrix mlp_forward(const Matrix& x, const MlpParams& p, MlpCache* cache = nullptr);
Matrix mlp_backward(const Matrix& d_out, MlpParams& p, const MlpCache& cache);

// Mention representation: mean over its token rows, inclusive span.
Matrix mention_mean(const Matrix& reps, int token_start, int token_end);
void mention_mean_backward(const Matrix& d_mention, int token_start, int token_end,
                           Matrix& d_reps);

// Diagnostic: mean pairwise cosine similarity across rows (oversmoothing probe).
double mean_pairwise_cosine(const Matrix& reps);

}  // namespace bee
