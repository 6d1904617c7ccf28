#pragma once

#include "bee/param.hpp"
#include "bee/rng.hpp"

namespace bee {

enum class HeadMode { concat, biaffine };

HeadMode head_mode_from_string(const std::string& s);
std::string to_string(HeadMode m);

// BIO tag head: softmax(ReLU(rep * W + b)) per token row.
struct TagHeadParams {
  Param w;  // k x |T|
  Param b;  // 1 x |T|

  TagHeadParams() = default;
  TagHeadParams(int k, int n_tags, Rng& rng);

  std::vector<Param*> all();
  int n_tags() const { return w.value.cols; }
};

struct TagHeadCache {
  Matrix x;  // input rows
  Matrix z;  // pre-ReLU logits
};

// Argument-role head over (head, dependent) representation pairs.
// concat mode: softmax(ReLU((h||d) * W + b)); biaffine mode:
// softmax over roles of h A[role] d^T + u h^T + u d^T (no ReLU).
struct PairHeadParams {
  HeadMode mode = HeadMode::concat;
  Param w;  // 2r x |R|
  Param b;  // 1 x |R|
  std::vector<Param> bilinear;  // |R| matrices, r x r
  Param u;                      // 1 x r, shared role-independent bias

  PairHeadParams() = default;
  PairHeadParams(HeadMode mode, int r, int n_roles, Rng& rng);

  std::vector<Param*> all();
  int n_roles() const;
};

struct PairHeadCache {
  Matrix h, d;  // P x r inputs
  Matrix cat;   // P x 2r (concat mode)
  Matrix z;     // pre-ReLU logits (concat) / logits (biaffine)
};

// Row-wise tag distributions for a batch of token representations: n x |T|.
Matrix tag_distribution(const Matrix& reps, const TagHeadParams& p,
                        TagHeadCache* cache = nullptr);

// d_act: gradient wrt the pre-softmax activations (for cross-entropy this is
// probs - onehot, scaled). Returns gradient wrt reps; accumulates param grads.
Matrix tag_backward(const Matrix& d_act, TagHeadParams& p, const TagHeadCache& cache);

// Row-wise role distributions for a batch of pairs: P x |R|.
Matrix pair_distribution(const Matrix& h, const Matrix& d, const PairHeadParams& p,
                         PairHeadCache* cache = nullptr);

// Gradients wrt h and d rows; accumulates param grads.
void pair_backward(const Matrix& d_act, PairHeadParams& p, const PairHeadCache& cache,
                   Matrix& dh, Matrix& dd);

}  // namespace bee
