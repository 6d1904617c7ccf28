#include <cmath>
#include <iostream>

#include <doctest.h>

#include "bee/errors.hpp"
#include "bee/graphembed.hpp"
#include "bee/kernels.hpp"

using namespace bee;

namespace {

EncoderOutput random_reps(int n, int d, Rng& rng) {
  EncoderOutput out;
  out.vectors = Matrix(n, d);
  init_uniform(out.vectors, rng, 1.0);
  return out;
}

DepGraph random_graph(int n, Rng& rng, double p = 0.35) {
  std::vector<DepEdge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < p) edges.push_back({i, j, "dep"});
  return DepGraph::build(n, edges);
}

// Softmax cross-entropy against fixed targets summed over mention pairs;
// exercises both MLPs and the GCN in one scalar.
double probe_loss(const EncoderOutput& c, const DepGraph* g, const GcnParams& gcn,
                  const Matrix& probe) {
  Matrix reps = embed(c, g, gcn);
  double s = 0.0;
  for (int i = 0; i < reps.size(); ++i) s += reps.data[i] * probe.data[i];
  return s;
}

}  // namespace

TEST_CASE("gcn_layer on two connected nodes averages the rows") {
  // A_hat of a connected pair is all 0.5, so with W = I each output row is the
  // ReLU of the mean of both input rows.
  Matrix h(2, 2);
  h.data = {2.0, -4.0, 6.0, 2.0};
  Matrix a_norm = normalize_adjacency(build_adjacency(2, {{0, 1, "d"}}));
  Matrix w = Matrix::identity(2);
  Matrix out = gcn_layer(h, a_norm, w);
  CHECK(out(0, 0) == doctest::Approx(4.0));   // (2+6)/2
  CHECK(out(0, 1) == doctest::Approx(0.0));   // ReLU(-1)
  CHECK(out(1, 0) == doctest::Approx(4.0));
  CHECK(out(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("gcn_layer rejects mismatched shapes") {
  Matrix h(3, 4);
  Matrix a(2, 2);
  Matrix w(4, 4);
  CHECK_THROWS_AS(gcn_layer(h, a, w), ShapeError);
  Matrix a3(3, 3);
  Matrix w_bad(5, 4);
  CHECK_THROWS_AS(gcn_layer(h, a3, w_bad), ShapeError);
}

TEST_CASE("no-graph mode passes encoder vectors through bit-exactly") {
  Rng rng(10);
  auto c = random_reps(5, 6, rng);
  GcnParams p(6, 6, 6, rng);
  GcnCache cache;
  Matrix out = embed(c, nullptr, p, &cache);
  CHECK(cache.bypass);
  CHECK(out == c.vectors);

  Matrix d(5, 6);
  init_uniform(d, rng, 1.0);
  Matrix back = embed_backward(d, nullptr, p, cache);
  CHECK(back == d);
  for (Param* q : p.all())
    for (double g : q->grad.data) CHECK(g == 0.0);
}

TEST_CASE("embed rejects a parse sized for a different sentence") {
  Rng rng(11);
  auto c = random_reps(4, 6, rng);
  GcnParams p(6, 6, 6, rng);
  DepGraph g = random_graph(5, rng);
  CHECK_THROWS_AS(embed(c, &g, p), AlignmentError);
}

TEST_CASE("embed output is permutation equivariant") {
  Rng rng(12);
  const int n = 6, d = 8;
  auto c = random_reps(n, d, rng);
  GcnParams p(d, d, d, rng);
  std::vector<DepEdge> edges = {{0, 1, "a"}, {1, 2, "b"}, {2, 3, "c"}, {3, 4, "d"}, {1, 5, "e"}};
  DepGraph g = DepGraph::build(n, edges);
  Matrix out = embed(c, &g, p);

  // Relabel nodes with the permutation sigma(i) = (i + 2) mod n.
  auto sigma = [&](int i) { return (i + 2) % n; };
  EncoderOutput cp;
  cp.vectors = Matrix(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) cp.vectors(sigma(i), j) = c.vectors(i, j);
  std::vector<DepEdge> pedges;
  for (const auto& e : edges) pedges.push_back({sigma(e.head), sigma(e.dependent), e.relation});
  DepGraph pg = DepGraph::build(n, pedges);
  Matrix pout = embed(cp, &pg, p);

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      CHECK(pout(sigma(i), j) == doctest::Approx(out(i, j)).epsilon(1e-9));
}

TEST_CASE("two layers propagate information exactly two hops") {
  // Path 0-1-2-3-4: node 0's features reach node 2 but not nodes 3 and 4.
  Rng rng(13);
  const int n = 5, d = 4;
  auto base = random_reps(n, d, rng);
  GcnParams p(d, d, d, rng);
  // Strictly positive weights and inputs keep ReLU active so propagation
  // distance is exactly the graph distance.
  for (auto& v : p.w1.value.data) v = std::abs(v) + 0.1;
  for (auto& v : p.w2.value.data) v = std::abs(v) + 0.1;
  for (auto& v : base.vectors.data) v = std::abs(v) + 0.1;

  DepGraph g = DepGraph::build(n, {{0, 1, "d"}, {1, 2, "d"}, {2, 3, "d"}, {3, 4, "d"}});
  Matrix out1 = embed(base, &g, p);

  EncoderOutput bumped = base;
  for (int j = 0; j < d; ++j) bumped.vectors(0, j) += 1.0;
  Matrix out2 = embed(bumped, &g, p);

  auto row_changed = [&](int i) {
    for (int j = 0; j < d; ++j)
      if (out1(i, j) != out2(i, j)) return true;
    return false;
  };
  CHECK(row_changed(0));
  CHECK(row_changed(1));
  CHECK(row_changed(2));
  CHECK(!row_changed(3));
  CHECK(!row_changed(4));
}

TEST_CASE("embed_backward matches finite differences") {
  Rng rng(14);
  const int n = 5, d = 4;
  GcnParams p(d, 4, 4, rng);
  DepGraph g = random_graph(n, rng);
  auto c = random_reps(n, d, rng);

  Matrix probe(n, 4);
  init_uniform(probe, rng, 1.0);

  GcnCache cache;
  // Stay away from ReLU kinks so central differences are valid.
  for (int attempt = 0; attempt < 100; ++attempt) {
    embed(c, &g, p, &cache);
    double margin = 1e9;
    for (double z : cache.z1.data) margin = std::min(margin, std::abs(z));
    for (double z : cache.z2.data) margin = std::min(margin, std::abs(z));
    if (margin > 1e-3) break;
    c = random_reps(n, d, rng);
  }
  embed(c, &g, p, &cache);
  zero_grads(p.all());
  Matrix d_in = embed_backward(probe, &g, p, cache);

  const double eps = 1e-6;
  double worst = 0.0;
  auto fd_check = [&](double* value, double analytic) {
    const double keep = *value;
    *value = keep + eps;
    const double up = probe_loss(c, &g, p, probe);
    *value = keep - eps;
    const double dn = probe_loss(c, &g, p, probe);
    *value = keep;
    const double numeric = (up - dn) / (2.0 * eps);
    const double denom = std::abs(analytic) + std::abs(numeric) + 1e-10;
    worst = std::max(worst, std::abs(analytic - numeric) / denom);
  };
  for (Param* q : p.all())
    for (int i = 0; i < q->value.size(); ++i) fd_check(&q->value.data[i], q->grad.data[i]);
  for (int i = 0; i < c.vectors.size(); ++i) fd_check(&c.vectors.data[i], d_in.data[i]);
  CHECK(worst < 1e-5);
}

TEST_CASE("mlp forward and backward match hand-computed small case") {
  // 1 -> 1 -> 1 with known weights: y = relu(x*2 + 1) * 3 - 1
  MlpParams p;
  p.w1 = Param("w1", 1, 1);
  p.b1 = Param("b1", 1, 1);
  p.w2 = Param("w2", 1, 1);
  p.b2 = Param("b2", 1, 1);
  p.w1.value(0, 0) = 2.0;
  p.b1.value(0, 0) = 1.0;
  p.w2.value(0, 0) = 3.0;
  p.b2.value(0, 0) = -1.0;

  Matrix x(1, 1);
  x(0, 0) = 2.0;
  MlpCache cache;
  Matrix y = mlp_forward(x, p, &cache);
  CHECK(y(0, 0) == doctest::Approx(14.0));  // relu(5)*3 - 1

  Matrix dy(1, 1);
  dy(0, 0) = 1.0;
  zero_grads(p.all());
  Matrix dx = mlp_backward(dy, p, cache);
  CHECK(dx(0, 0) == doctest::Approx(6.0));            // 3 * 2
  CHECK(p.w2.grad(0, 0) == doctest::Approx(5.0));     // h1
  CHECK(p.b2.grad(0, 0) == doctest::Approx(1.0));
  CHECK(p.w1.grad(0, 0) == doctest::Approx(6.0));     // x * (dy*w2)
  CHECK(p.b1.grad(0, 0) == doctest::Approx(3.0));
}

TEST_CASE("mlp gradient matches finite differences") {
  Rng rng(15);
  MlpParams p("m", 5, 7, 3, rng);
  Matrix x(4, 5);
  Matrix probe(4, 3);
  init_uniform(probe, rng, 1.0);

  MlpCache cache;
  for (int attempt = 0; attempt < 100; ++attempt) {
    init_uniform(x, rng, 1.0);
    mlp_forward(x, p, &cache);
    double margin = 1e9;
    for (double z : cache.z1.data) margin = std::min(margin, std::abs(z));
    if (margin > 1e-3) break;
  }
  mlp_forward(x, p, &cache);
  zero_grads(p.all());
  Matrix dx = mlp_backward(probe, p, cache);

  auto loss = [&]() {
    Matrix y = mlp_forward(x, p);
    double s = 0.0;
    for (int i = 0; i < y.size(); ++i) s += y.data[i] * probe.data[i];
    return s;
  };
  const double eps = 1e-6;
  double worst = 0.0;
  auto fd_check = [&](double* value, double analytic) {
    const double keep = *value;
    *value = keep + eps;
    const double up = loss();
    *value = keep - eps;
    const double dn = loss();
    *value = keep;
    const double numeric = (up - dn) / (2.0 * eps);
    worst = std::max(worst,
                     std::abs(analytic - numeric) / (std::abs(analytic) + std::abs(numeric) + 1e-10));
  };
  for (Param* q : p.all())
    for (int i = 0; i < q->value.size(); ++i) fd_check(&q->value.data[i], q->grad.data[i]);
  for (int i = 0; i < x.size(); ++i) fd_check(&x.data[i], dx.data[i]);
  CHECK(worst < 1e-5);
}

TEST_CASE("mention_mean averages the inclusive token span") {
  Matrix reps(3, 2);
  reps.data = {1, 2, 3, 4, 5, 6};
  Matrix m = mention_mean(reps, 1, 2);
  CHECK(m.rows == 1);
  CHECK(m(0, 0) == doctest::Approx(4.0));
  CHECK(m(0, 1) == doctest::Approx(5.0));

  Matrix one = mention_mean(reps, 0, 0);
  CHECK(one(0, 0) == 1.0);

  CHECK_THROWS_AS(mention_mean(reps, 2, 1), ShapeError);
  CHECK_THROWS_AS(mention_mean(reps, 1, 3), ShapeError);
}

TEST_CASE("mention_mean_backward spreads gradient over the span") {
  Matrix d_reps(3, 2);
  Matrix dm(1, 2);
  dm.data = {4.0, 8.0};
  mention_mean_backward(dm, 0, 1, d_reps);
  CHECK(d_reps(0, 0) == doctest::Approx(2.0));
  CHECK(d_reps(1, 1) == doctest::Approx(4.0));
  CHECK(d_reps(2, 0) == 0.0);
  // accumulates rather than overwrites
  mention_mean_backward(dm, 0, 0, d_reps);
  CHECK(d_reps(0, 0) == doctest::Approx(6.0));
}

TEST_CASE("oversmoothing probe: stacked layers raise mean pairwise cosine") {
  Rng rng(16);
  const int n = 8, d = 16;
  auto c = random_reps(n, d, rng);
  DepGraph g = random_graph(n, rng, 0.5);

  Matrix h = c.vectors;
  Matrix w = Matrix::identity(d);
  double cos0 = mean_pairwise_cosine(h);
  double cos_prev = cos0;
  int rises = 0;
  for (int layer = 0; layer < 6; ++layer) {
    h = gcn_layer(h, g.a_norm, w);
    double cos_now = mean_pairwise_cosine(h);
    if (cos_now >= cos_prev - 1e-9) ++rises;
    cos_prev = cos_now;
  }
  // Deep stacks drive representations toward a shared direction.
  CHECK(cos_prev > cos0);
  CHECK(rises >= 5);
  std::cout << "[oversmoothing] cosine layer0=" << cos0 << " layer6=" << cos_prev << "\n";
}

TEST_CASE("two-layer embed keeps rows distinguishable on sentence-sized graphs") {
  Rng rng(17);
  const int n = 10, d = 16;
  auto c = random_reps(n, d, rng);
  GcnParams p(d, d, d, rng);
  DepGraph g = random_graph(n, rng, 0.3);
  Matrix out = embed(c, &g, p);
  double cos_in = mean_pairwise_cosine(c.vectors);
  double cos_out = mean_pairwise_cosine(out);
  CHECK(cos_out < 0.999);
  std::cout << "[oversmoothing] embed cosine in=" << cos_in << " out=" << cos_out << "\n";
}
