#include <cmath>

#include <doctest.h>

#include "bee/errors.hpp"
#include "bee/heads.hpp"
#include "bee/kernels.hpp"
#include "bee/rng.hpp"

using namespace bee;

namespace {

double row_sum(const Matrix& m, int i) {
  double s = 0.0;
  for (int j = 0; j < m.cols; ++j) s += m(i, j);
  return s;
}

int argmax_row(const Matrix& m, int i) {
  int best = 0;
  for (int j = 1; j < m.cols; ++j)
    if (m(i, j) > m(i, best)) best = j;
  return best;
}

}  // namespace

TEST_CASE("head mode strings round trip") {
  CHECK(head_mode_from_string("concat") == HeadMode::concat);
  CHECK(head_mode_from_string("biaffine") == HeadMode::biaffine);
  CHECK(to_string(HeadMode::biaffine) == "biaffine");
  CHECK_THROWS_AS(head_mode_from_string("bilinear"), ParseError);
}

TEST_CASE("zero-weight tag head yields a near-uniform distribution") {
  TagHeadParams p;
  p.w = Param("tag.w", 4, 3);
  p.b = Param("tag.b", 1, 3);
  Matrix reps(2, 4);
  reps.data = {1, -2, 3, 4, 0, 0, 1, -1};
  Matrix probs = tag_distribution(reps, p);
  for (int i = 0; i < 2; ++i) {
    CHECK(row_sum(probs, i) == doctest::Approx(1.0).epsilon(1e-12));
    for (int j = 0; j < 3; ++j) CHECK(probs(i, j) == doctest::Approx(1.0 / 3));
  }
}

TEST_CASE("tag head scalar case matches hand computation") {
  // One-dimensional rep, two tags: z = [relu(x*1+0), relu(x*-1+0)].
  TagHeadParams p;
  p.w = Param("tag.w", 1, 2);
  p.b = Param("tag.b", 1, 2);
  p.w.value(0, 0) = 1.0;
  p.w.value(0, 1) = -1.0;
  Matrix reps(1, 1);
  reps(0, 0) = 2.0;
  Matrix probs = tag_distribution(reps, p);
  // activations relu([2,-2]) = [2,0] -> softmax
  const double e2 = std::exp(2.0), e0 = 1.0;
  CHECK(probs(0, 0) == doctest::Approx(e2 / (e2 + e0)));
  CHECK(probs(0, 1) == doctest::Approx(e0 / (e2 + e0)));
}

TEST_CASE("tag backward matches finite differences through relu and softmax CE") {
  Rng rng(21);
  TagHeadParams p(6, 5, rng);
  Matrix reps(4, 6);
  std::vector<int> targets = {0, 2, 4, 1};

  // Keep every pre-activation away from the ReLU kink so the central
  // difference stays on one side of it.
  for (int attempt = 0; attempt < 100; ++attempt) {
    init_uniform(reps, rng, 1.0);
    TagHeadCache probe_cache;
    tag_distribution(reps, p, &probe_cache);
    double margin = 1e9;
    for (double z : probe_cache.z.data) margin = std::min(margin, std::abs(z));
    if (margin > 1e-3) break;
  }

  auto loss_of = [&]() {
    Matrix probs = tag_distribution(reps, p);
    double l = 0.0;
    for (int i = 0; i < probs.rows; ++i) l -= std::log(probs(i, targets[i]));
    return l / probs.rows;
  };

  TagHeadCache cache;
  Matrix probs = tag_distribution(reps, p, &cache);
  Matrix d_act(probs.rows, probs.cols);
  for (int i = 0; i < probs.rows; ++i)
    for (int j = 0; j < probs.cols; ++j)
      d_act(i, j) = (probs(i, j) - (j == targets[i] ? 1.0 : 0.0)) / probs.rows;
  zero_grads(p.all());
  Matrix d_reps = tag_backward(d_act, p, cache);

  const double eps = 1e-6;
  double worst = 0.0;
  auto fd = [&](double* v, double analytic) {
    const double keep = *v;
    *v = keep + eps;
    const double up = loss_of();
    *v = keep - eps;
    const double dn = loss_of();
    *v = keep;
    const double numeric = (up - dn) / (2 * eps);
    worst = std::max(worst,
                     std::abs(analytic - numeric) / (std::abs(analytic) + std::abs(numeric) + 1e-10));
  };
  for (Param* q : p.all())
    for (int i = 0; i < q->value.size(); ++i) fd(&q->value.data[i], q->grad.data[i]);
  for (int i = 0; i < reps.size(); ++i) fd(&reps.data[i], d_reps.data[i]);
  CHECK(worst < 1e-5);
}

TEST_CASE("concat pair head is order sensitive") {
  // Weights that read only the head half of the concatenation.
  PairHeadParams p;
  p.mode = HeadMode::concat;
  p.w = Param("pair.w", 4, 2);
  p.b = Param("pair.b", 1, 2);
  p.w.value(0, 0) = 1.0;  // role 0 looks at h[0]
  p.w.value(2, 1) = 1.0;  // role 1 looks at d[0]
  Matrix h(1, 2), d(1, 2);
  h.data = {3.0, 0.0};
  d.data = {0.5, 0.0};
  Matrix fwd = pair_distribution(h, d, p);
  Matrix rev = pair_distribution(d, h, p);
  CHECK(argmax_row(fwd, 0) == 0);
  CHECK(argmax_row(rev, 0) == 1);
  CHECK(fwd(0, 0) != rev(0, 0));
}

TEST_CASE("pair distributions are proper distributions in both modes") {
  Rng rng(22);
  for (HeadMode mode : {HeadMode::concat, HeadMode::biaffine}) {
    PairHeadParams p(mode, 5, 4, rng);
    Matrix h(7, 5), d(7, 5);
    init_uniform(h, rng, 2.0);
    init_uniform(d, rng, 2.0);
    Matrix probs = pair_distribution(h, d, p);
    REQUIRE(probs.rows == 7);
    REQUIRE(probs.cols == 4);
    for (int i = 0; i < probs.rows; ++i) {
      CHECK(row_sum(probs, i) == doctest::Approx(1.0).epsilon(1e-12));
      for (int j = 0; j < probs.cols; ++j) CHECK(probs(i, j) > 0.0);
    }
  }
}

TEST_CASE("biaffine shared term cancels across roles") {
  // The u-term is role-independent, so it shifts all logits of a row equally
  // and the distribution only reflects the bilinear scores.
  Rng rng(23);
  PairHeadParams p(HeadMode::biaffine, 4, 3, rng);
  Matrix h(2, 4), d(2, 4);
  init_uniform(h, rng, 1.0);
  init_uniform(d, rng, 1.0);
  Matrix with_u = pair_distribution(h, d, p);
  Matrix saved_u = p.u.value;
  p.u.value.zero();
  Matrix without_u = pair_distribution(h, d, p);
  p.u.value = saved_u;
  for (int i = 0; i < with_u.size(); ++i)
    CHECK(with_u.data[i] == doctest::Approx(without_u.data[i]).epsilon(1e-9));
}

TEST_CASE("pair backward matches finite differences in both modes") {
  Rng rng(24);
  for (HeadMode mode : {HeadMode::concat, HeadMode::biaffine}) {
    CAPTURE(to_string(mode));
    PairHeadParams p(mode, 4, 3, rng);
    Matrix h(5, 4), d(5, 4);
    std::vector<int> targets = {0, 1, 2, 0, 1};
    for (int attempt = 0; attempt < 100; ++attempt) {
      init_uniform(h, rng, 1.0);
      init_uniform(d, rng, 1.0);
      if (mode == HeadMode::biaffine) break;  // smooth everywhere
      PairHeadCache probe_cache;
      pair_distribution(h, d, p, &probe_cache);
      double margin = 1e9;
      for (double z : probe_cache.z.data) margin = std::min(margin, std::abs(z));
      if (margin > 1e-3) break;
    }

    auto loss_of = [&]() {
      Matrix probs = pair_distribution(h, d, p);
      double l = 0.0;
      for (int i = 0; i < probs.rows; ++i) l -= std::log(probs(i, targets[i]));
      return l / probs.rows;
    };

    PairHeadCache cache;
    Matrix probs = pair_distribution(h, d, p, &cache);
    Matrix d_act(probs.rows, probs.cols);
    for (int i = 0; i < probs.rows; ++i)
      for (int j = 0; j < probs.cols; ++j)
        d_act(i, j) = (probs(i, j) - (j == targets[i] ? 1.0 : 0.0)) / probs.rows;
    zero_grads(p.all());
    Matrix dh, dd;
    pair_backward(d_act, p, cache, dh, dd);

    const double eps = 1e-6;
    double worst = 0.0;
    auto fd = [&](double* v, double analytic) {
      const double keep = *v;
      *v = keep + eps;
      const double up = loss_of();
      *v = keep - eps;
      const double dn = loss_of();
      *v = keep;
      const double numeric = (up - dn) / (2 * eps);
      // the shared u term cancels in the softmax: its true gradient is zero
      // and the central difference is pure rounding noise
      if (std::abs(analytic) < 1e-9 && std::abs(numeric) < 1e-6) return;
      worst = std::max(
          worst, std::abs(analytic - numeric) / (std::abs(analytic) + std::abs(numeric) + 1e-10));
    };
    for (Param* q : p.all())
      for (int i = 0; i < q->value.size(); ++i) fd(&q->value.data[i], q->grad.data[i]);
    for (int i = 0; i < h.size(); ++i) fd(&h.data[i], dh.data[i]);
    for (int i = 0; i < d.size(); ++i) fd(&d.data[i], dd.data[i]);
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("heads have enough capacity to memorize a small pair table") {
  // 32 pairs with roles keyed by the dependent vector; plain SGD on the pair
  // CE must reach 100% argmax accuracy in both modes.
  Rng rng(25);
  const int r = 8, n_roles = 3, n_pairs = 32;
  Matrix h(n_pairs, r), d(n_pairs, r);
  init_uniform(h, rng, 1.0);
  init_uniform(d, rng, 1.0);
  std::vector<int> targets(n_pairs);
  for (int i = 0; i < n_pairs; ++i) targets[i] = i % n_roles;
  // Make the role recoverable: stamp the target into the dependent vector.
  for (int i = 0; i < n_pairs; ++i) d(i, targets[i]) += 2.0;

  for (HeadMode mode : {HeadMode::concat, HeadMode::biaffine}) {
    CAPTURE(to_string(mode));
    PairHeadParams p(mode, r, n_roles, rng);
    double lr = 0.5;
    int correct = 0;
    for (int step = 0; step < 2000; ++step) {
      PairHeadCache cache;
      Matrix probs = pair_distribution(h, d, p, &cache);
      Matrix d_act(probs.rows, probs.cols);
      correct = 0;
      for (int i = 0; i < n_pairs; ++i) {
        if (argmax_row(probs, i) == targets[i]) ++correct;
        for (int j = 0; j < n_roles; ++j)
          d_act(i, j) = (probs(i, j) - (j == targets[i] ? 1.0 : 0.0)) / n_pairs;
      }
      if (correct == n_pairs && step > 10) break;
      zero_grads(p.all());
      Matrix dh, dd;
      pair_backward(d_act, p, cache, dh, dd);
      for (Param* q : p.all())
        for (int i = 0; i < q->value.size(); ++i) q->value.data[i] -= lr * q->grad.data[i];
    }
    CHECK(correct == n_pairs);
  }
}

TEST_CASE("softmax argmax is invariant to uniform logit shifts") {
  Rng rng(26);
  Matrix z(3, 4);
  init_uniform(z, rng, 2.0);
  Matrix p1, p2;
  kernels::softmax_rows(z, p1);
  Matrix shifted = z;
  for (auto& v : shifted.data) v += 17.5;
  kernels::softmax_rows(shifted, p2);
  for (int i = 0; i < 3; ++i) CHECK(argmax_row(p1, i) == argmax_row(p2, i));
  for (int i = 0; i < p1.size(); ++i) CHECK(p1.data[i] == doctest::Approx(p2.data[i]).epsilon(1e-12));
}

TEST_CASE("pair head rejects mismatched head/dependent batches") {
  Rng rng(27);
  PairHeadParams p(HeadMode::concat, 4, 2, rng);
  Matrix h(3, 4), d(2, 4);
  CHECK_THROWS_AS(pair_distribution(h, d, p), ShapeError);
}
