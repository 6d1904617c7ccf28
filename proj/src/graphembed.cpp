#include "bee/graphembed.hpp"

#include <cmath>

#include "bee/kernels.hpp"

namespace bee {

namespace k = bee::kernels;

namespace {
// Positive bias keeps ReLU units live at init (dying-ReLU mitigation).
constexpr double kReluBiasInit = 0.1;
}  // namespace

GcnParams::GcnParams(int d, int d1, int d2, Rng& rng) {
  w1 = Param("gcn.w1", d, d1);
  b1 = Param("gcn.b1", 1, d1);
  w2 = Param("gcn.w2", d1, d2);
  b2 = Param("gcn.b2", 1, d2);
  init_uniform(w1.value, rng, 1.0 / std::sqrt(static_cast<double>(d)));
  init_uniform(w2.value, rng, 1.0 / std::sqrt(static_cast<double>(d1)));
  b1.value.fill(kReluBiasInit);
  b2.value.fill(kReluBiasInit);
}

std::vector<Param*> GcnParams::all() { return {&w1, &b1, &w2, &b2}; }

MlpParams::MlpParams(const std::string& prefix, int in, int m, int out, Rng& rng) {
  w1 = Param(prefix + ".w1", in, m);
  b1 = Param(prefix + ".b1", 1, m);
  w2 = Param(prefix + ".w2", m, out);
  b2 = Param(prefix + ".b2", 1, out);
  init_uniform(w1.value, rng, 1.0 / std::sqrt(static_cast<double>(in)));
  init_uniform(w2.value, rng, 1.0 / std::sqrt(static_cast<double>(m)));
  b1.value.fill(kReluBiasInit);  // w2/b2 output is linear, stays at zero
}

std::vector<Param*> MlpParams::all() { return {&w1, &b1, &w2, &b2}; }

HeadDepParams::HeadDepParams(int in, int m, int out, Rng& rng)
    : mlp_h("mlp_h", in, m, out, rng), mlp_d("mlp_d", in, m, out, rng) {}

std::vector<Param*> HeadDepParams::all() {
  std::vector<Param*> out = mlp_h.all();
  for (Param* p : mlp_d.all()) out.push_back(p);
  return out;
}

Matrix gcn_layer(const Matrix& h, const Matrix& a_norm, const Matrix& w) {
  if (a_norm.rows != a_norm.cols || a_norm.cols != h.rows || h.cols != w.rows)
    throw ShapeError("gcn_layer: incompatible shapes");
  Matrix ah, z, out;
  k::matmul(a_norm, h, ah);
  k::matmul(ah, w, z);
  k::relu_forward(z, out);
  return out;
}

Matrix embed(const EncoderOutput& c, const DepGraph* g, const GcnParams& p, GcnCache* cache) {
  if (!g) {
    if (cache) {
      *cache = GcnCache{};
      cache->bypass = true;
    }
    return c.vectors;
  }
  if (g->n != c.vectors.rows)
    throw AlignmentError("parse has " + std::to_string(g->n) + " tokens but sentence has " +
                         std::to_string(c.vectors.rows));

  Matrix ah0, z1, h1, ah1, z2, h2;
  k::matmul(g->a_norm, c.vectors, ah0);
  k::matmul(ah0, p.w1.value, z1);
  k::add_row_bias(z1, p.b1.value);
  k::relu_forward(z1, h1);
  k::matmul(g->a_norm, h1, ah1);
  k::matmul(ah1, p.w2.value, z2);
  k::add_row_bias(z2, p.b2.value);
  k::relu_forward(z2, h2);

  if (cache) {
    cache->bypass = false;
    cache->ah0 = std::move(ah0);
    cache->z1 = std::move(z1);
    cache->h1 = std::move(h1);
    cache->ah1 = std::move(ah1);
    cache->z2 = std::move(z2);
  }
  return h2;
}

Matrix embed_backward(const Matrix& d_out, const DepGraph* g, GcnParams& p, const GcnCache& cache) {
  if (cache.bypass) {
    if (g) throw ContractViolation("embed_backward: bypass cache with a graph");
    return d_out;
  }
  if (!g) throw ContractViolation("embed_backward: graph cache without a graph");

  Matrix dz2;
  k::relu_backward(cache.z2, d_out, dz2);
  Matrix dw2, db2;
  k::matmul_at_b(cache.ah1, dz2, dw2);
  k::col_sums(dz2, db2);
  for (int i = 0; i < dw2.size(); ++i) p.w2.grad.data[i] += dw2.data[i];
  for (int i = 0; i < db2.size(); ++i) p.b2.grad.data[i] += db2.data[i];

  Matrix d_ah1, dh1;
  k::matmul_a_bt(dz2, p.w2.value, d_ah1);
  k::matmul(g->a_norm, d_ah1, dh1);  // A_norm is symmetric

  Matrix dz1;
  k::relu_backward(cache.z1, dh1, dz1);
  Matrix dw1, db1;
  k::matmul_at_b(cache.ah0, dz1, dw1);
  k::col_sums(dz1, db1);
  for (int i = 0; i < dw1.size(); ++i) p.w1.grad.data[i] += dw1.data[i];
  for (int i = 0; i < db1.size(); ++i) p.b1.grad.data[i] += db1.data[i];

  Matrix d_ah0, dc;
  k::matmul_a_bt(dz1, p.w1.value, d_ah0);
  k::matmul(g->a_norm, d_ah0, dc);
  return dc;
}

Matrix mlp_forward(const Matrix& x, const MlpParams& p, MlpCache* cache) {
  if (x.cols != p.w1.value.rows) throw ShapeError("mlp_forward: input width mismatch");
  Matrix z1, h1, out;
  k::matmul(x, p.w1.value, z1);
  k::add_row_bias(z1, p.b1.value);
  k::relu_forward(z1, h1);
  k::matmul(h1, p.w2.value, out);
  k::add_row_bias(out, p.b2.value);
  if (cache) {
    cache->x = x;
    cache->z1 = std::move(z1);
    cache->h1 = std::move(h1);
  }
  return out;
}

Matrix mlp_backward(const Matrix& d_out, MlpParams& p, const MlpCache& cache) {
  Matrix dw2, db2;
  k::matmul_at_b(cache.h1, d_out, dw2);
  k::col_sums(d_out, db2);
  for (int i = 0; i < dw2.size(); ++i) p.w2.grad.data[i] += dw2.data[i];
  for (int i = 0; i < db2.size(); ++i) p.b2.grad.data[i] += db2.data[i];

  Matrix dh1, dz1;
  k::matmul_a_bt(d_out, p.w2.value, dh1);
  k::relu_backward(cache.z1, dh1, dz1);

  Matrix dw1, db1;
  k::matmul_at_b(cache.x, dz1, dw1);
  k::col_sums(dz1, db1);
  for (int i = 0; i < dw1.size(); ++i) p.w1.grad.data[i] += dw1.data[i];
  for (int i = 0; i < db1.size(); ++i) p.b1.grad.data[i] += db1.data[i];

  Matrix dx;
  k::matmul_a_bt(dz1, p.w1.value, dx);
  return dx;
}

Matrix mention_mean(const Matrix& reps, int token_start, int token_end) {
  if (token_start < 0 || token_end >= reps.rows || token_start > token_end)
    throw ShapeError("mention_mean: span out of range");
  Matrix out(1, reps.cols);
  const double inv = 1.0 / (token_end - token_start + 1);
  for (int t = token_start; t <= token_end; ++t)
    for (int j = 0; j < reps.cols; ++j) out.data[j] += reps(t, j);
  for (double& v : out.data) v *= inv;
  return out;
}

void mention_mean_backward(const Matrix& d_mention, int token_start, int token_end,
                           Matrix& d_reps) {
  const double inv = 1.0 / (token_end - token_start + 1);
  for (int t = token_start; t <= token_end; ++t)
    for (int j = 0; j < d_reps.cols; ++j) d_reps(t, j) += d_mention.data[j] * inv;
}

double mean_pairwise_cosine(const Matrix& reps) {
  const int n = reps.rows;
  if (n < 2) return 1.0;
  std::vector<double> norms(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < reps.cols; ++j) s += reps(i, j) * reps(i, j);
    norms[i] = std::sqrt(s);
  }
  double total = 0.0;
  int count = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double dot = 0.0;
      for (int c = 0; c < reps.cols; ++c) dot += reps(i, c) * reps(j, c);
      const double denom = norms[i] * norms[j];
      total += denom > 0.0 ? dot / denom : 0.0;
      ++count;
    }
  return total / count;
}

}  // namespace bee
