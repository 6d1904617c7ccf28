#include "bee/heads.hpp"

#include <cmath>

#include "bee/errors.hpp"
#include "bee/kernels.hpp"

namespace bee {

namespace k = bee::kernels;

HeadMode head_mode_from_string(const std::string& s) {
  if (s == "concat") return HeadMode::concat;
  if (s == "biaffine") return HeadMode::biaffine;
  throw ParseError("unknown head mode '" + s + "' (expected concat or biaffine)");
}

std::string to_string(HeadMode m) {
  return m == HeadMode::concat ? "concat" : "biaffine";
}

namespace {
// ReLU feeding a softmax has a hard failure mode: once a class logit sits at
// the zero floor for an example, no gradient can raise it again for that
// example. A bias init of 1.0 starts every logit well inside the live region.
constexpr double kBiasInit = 1.0;
}  // namespace

TagHeadParams::TagHeadParams(int kdim, int n_tags, Rng& rng) {
  w = Param("tag.w", kdim, n_tags);
  b = Param("tag.b", 1, n_tags);
  init_uniform(w.value, rng, 1.0 / std::sqrt(static_cast<double>(kdim)));
  b.value.fill(kBiasInit);
}

std::vector<Param*> TagHeadParams::all() { return {&w, &b}; }

PairHeadParams::PairHeadParams(HeadMode mode_, int r, int n_roles, Rng& rng) : mode(mode_) {
  if (mode == HeadMode::concat) {
    w = Param("pair.w", 2 * r, n_roles);
    b = Param("pair.b", 1, n_roles);
    init_uniform(w.value, rng, 1.0 / std::sqrt(2.0 * r));
    b.value.fill(kBiasInit);
  } else {
    for (int rho = 0; rho < n_roles; ++rho) {
      Param a("pair.a" + std::to_string(rho), r, r);
      init_uniform(a.value, rng, 1.0 / std::sqrt(static_cast<double>(r)));
      bilinear.push_back(std::move(a));
    }
    u = Param("pair.u", 1, r);
    init_uniform(u.value, rng, 1.0 / std::sqrt(static_cast<double>(r)));
  }
}

std::vector<Param*> PairHeadParams::all() {
  if (mode == HeadMode::concat) return {&w, &b};
  std::vector<Param*> out;
  for (Param& a : bilinear) out.push_back(&a);
  out.push_back(&u);
  return out;
}

int PairHeadParams::n_roles() const {
  return mode == HeadMode::concat ? w.value.cols : static_cast<int>(bilinear.size());
}

Matrix tag_distribution(const Matrix& reps, const TagHeadParams& p, TagHeadCache* cache) {
  Matrix z, a, probs;
  k::matmul(reps, p.w.value, z);
  k::add_row_bias(z, p.b.value);
  k::relu_forward(z, a);
  k::softmax_rows(a, probs);
  if (cache) {
    cache->x = reps;
    cache->z = std::move(z);
  }
  return probs;
}

Matrix tag_backward(const Matrix& d_act, TagHeadParams& p, const TagHeadCache& cache) {
  Matrix dz;
  k::relu_backward(cache.z, d_act, dz);
  Matrix dw, db;
  k::matmul_at_b(cache.x, dz, dw);
  k::col_sums(dz, db);
  for (int i = 0; i < dw.size(); ++i) p.w.grad.data[i] += dw.data[i];
  for (int i = 0; i < db.size(); ++i) p.b.grad.data[i] += db.data[i];
  Matrix dx;
  k::matmul_a_bt(dz, p.w.value, dx);
  return dx;
}

Matrix pair_distribution(const Matrix& h, const Matrix& d, const PairHeadParams& p,
                         PairHeadCache* cache) {
  if (h.rows != d.rows || h.cols != d.cols)
    throw ShapeError("pair_distribution: head/dependent batches differ in shape");
  const int n = h.rows;
  const int r = h.cols;
  Matrix z;
  Matrix cat;
  if (p.mode == HeadMode::concat) {
    cat = Matrix(n, 2 * r);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < r; ++j) {
        cat(i, j) = h(i, j);
        cat(i, r + j) = d(i, j);
      }
    }
    k::matmul(cat, p.w.value, z);
    k::add_row_bias(z, p.b.value);
    Matrix a, probs;
    k::relu_forward(z, a);
    k::softmax_rows(a, probs);
    if (cache) {
      cache->h = h;
      cache->d = d;
      cache->cat = std::move(cat);
      cache->z = std::move(z);
    }
    return probs;
  }

  const int n_roles = p.n_roles();
  z = Matrix(n, n_roles);
  for (int i = 0; i < n; ++i) {
    double shared = 0.0;
    for (int j = 0; j < r; ++j) shared += p.u.value.data[j] * (h(i, j) + d(i, j));
    for (int rho = 0; rho < n_roles; ++rho) {
      const Matrix& a = p.bilinear[rho].value;
      double s = 0.0;
      for (int x = 0; x < r; ++x) {
        double row = 0.0;
        for (int y = 0; y < r; ++y) row += a(x, y) * d(i, y);
        s += h(i, x) * row;
      }
      z(i, rho) = s + shared;
    }
  }
  Matrix probs;
  k::softmax_rows(z, probs);
  if (cache) {
    cache->h = h;
    cache->d = d;
    cache->z = std::move(z);
  }
  return probs;
}

void pair_backward(const Matrix& d_act, PairHeadParams& p, const PairHeadCache& cache,
                   Matrix& dh, Matrix& dd) {
  const int n = cache.h.rows;
  const int r = cache.h.cols;
  dh = Matrix(n, r);
  dd = Matrix(n, r);

  if (p.mode == HeadMode::concat) {
    Matrix dz;
    k::relu_backward(cache.z, d_act, dz);
    Matrix dw, db;
    k::matmul_at_b(cache.cat, dz, dw);
    k::col_sums(dz, db);
    for (int i = 0; i < dw.size(); ++i) p.w.grad.data[i] += dw.data[i];
    for (int i = 0; i < db.size(); ++i) p.b.grad.data[i] += db.data[i];
    Matrix dcat;
    k::matmul_a_bt(dz, p.w.value, dcat);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < r; ++j) {
        dh(i, j) = dcat(i, j);
        dd(i, j) = dcat(i, r + j);
      }
    return;
  }

  const int n_roles = p.n_roles();
  for (int i = 0; i < n; ++i) {
    double dz_sum = 0.0;
    for (int rho = 0; rho < n_roles; ++rho) {
      const double g = d_act(i, rho);
      dz_sum += g;
      Matrix& da = p.bilinear[rho].grad;
      const Matrix& a = p.bilinear[rho].value;
      for (int x = 0; x < r; ++x) {
        const double hx = cache.h(i, x);
        for (int y = 0; y < r; ++y) {
          da(x, y) += g * hx * cache.d(i, y);
          dh(i, x) += g * a(x, y) * cache.d(i, y);
          dd(i, y) += g * a(x, y) * hx;
        }
      }
    }
    for (int j = 0; j < r; ++j) {
      p.u.grad.data[j] += dz_sum * (cache.h(i, j) + cache.d(i, j));
      dh(i, j) += dz_sum * p.u.value.data[j];
      dd(i, j) += dz_sum * p.u.value.data[j];
    }
  }
}

}  // namespace bee
