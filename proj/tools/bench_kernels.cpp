// Compares the OpenMP kernels against the serial reference implementations:
// wall time and bit-exactness on the shapes the models actually use.

#include <chrono>
#include <cstdio>
#include <vector>

#include "bee/kernels.hpp"
#include "bee/rng.hpp"

using namespace bee;
namespace k = bee::kernels;
namespace ref = bee::kernels::reference;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

template <typename F>
double time_ms(int reps, F&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  return ms_since(t0) / reps;
}

}  // namespace

int main() {
  Rng rng(42);
  std::printf("%-26s %10s %10s %8s %s\n", "kernel", "omp ms", "serial ms", "speedup", "bit-equal");

  const std::vector<std::tuple<int, int, int>> shapes = {
      {64, 64, 64}, {128, 128, 128}, {256, 256, 256}, {100, 768, 768}};

  for (const auto& [n, kdim, mdim] : shapes) {
    Matrix a(n, kdim), b(kdim, mdim);
    init_uniform(a, rng, 1.0);
    init_uniform(b, rng, 1.0);
    Matrix c1, c2;
    const int reps = n <= 128 ? 50 : 10;
    const double omp_ms = time_ms(reps, [&] { k::matmul(a, b, c1); });
    const double ser_ms = time_ms(reps, [&] { ref::matmul(a, b, c2); });
    char label[64];
    std::snprintf(label, sizeof(label), "matmul %dx%dx%d", n, kdim, mdim);
    std::printf("%-26s %10.3f %10.3f %7.2fx %s\n", label, omp_ms, ser_ms, ser_ms / omp_ms,
                c1 == c2 ? "yes" : "NO");
  }

  {
    const int n = 256, m = 256;
    Matrix z(n, m), p1, p2;
    init_uniform(z, rng, 4.0);
    const double omp_ms = time_ms(50, [&] { k::softmax_rows(z, p1); });
    const double ser_ms = time_ms(50, [&] { ref::softmax_rows(z, p2); });
    std::printf("%-26s %10.3f %10.3f %7.2fx %s\n", "softmax_rows 256x256", omp_ms, ser_ms,
                ser_ms / omp_ms, p1 == p2 ? "yes" : "NO");
  }
  {
    const int n = 256, m = 256;
    Matrix z(n, m), a1, a2;
    init_uniform(z, rng, 1.0);
    const double omp_ms = time_ms(50, [&] { k::relu_forward(z, a1); });
    const double ser_ms = time_ms(50, [&] { ref::relu_forward(z, a2); });
    std::printf("%-26s %10.3f %10.3f %7.2fx %s\n", "relu_forward 256x256", omp_ms, ser_ms,
                ser_ms / omp_ms, a1 == a2 ? "yes" : "NO");
  }
  return 0;
}
