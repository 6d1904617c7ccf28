#include "bee/kernels.hpp"

#include <cmath>
#include <string>

#include "bee/errors.hpp"

// Serial reference kernels. Loop structure and accumulation order match
// the OpenMP versions exactly so the two are bit-comparable in tests.

namespace bee::kernels::reference {

namespace {
void require(bool ok, const char* what) {
  if (!ok) throw ShapeError(std::string("kernel operand mismatch: ") + what);
}
}  // namespace

void matmul(const Matrix& A, const Matrix& B, Matrix& C) {
  require(A.cols == B.rows, "matmul A.cols != B.rows");
  C = Matrix(A.rows, B.cols);
  for (int i = 0; i < A.rows; ++i) {
    double* ci = C.row(i);
    const double* ai = A.row(i);
    for (int k = 0; k < A.cols; ++k) {
      const double a = ai[k];
      const double* bk = B.row(k);
      for (int j = 0; j < B.cols; ++j) ci[j] += a * bk[j];
    }
  }
}

void matmul_at_b(const Matrix& A, const Matrix& B, Matrix& C) {
  require(A.rows == B.rows, "matmul_at_b A.rows != B.rows");
  C = Matrix(A.cols, B.cols);
  for (int i = 0; i < A.cols; ++i) {
    double* ci = C.row(i);
    for (int k = 0; k < A.rows; ++k) {
      const double a = A(k, i);
      const double* bk = B.row(k);
      for (int j = 0; j < B.cols; ++j) ci[j] += a * bk[j];
    }
  }
}

void matmul_a_bt(const Matrix& A, const Matrix& B, Matrix& C) {
  require(A.cols == B.cols, "matmul_a_bt A.cols != B.cols");
  C = Matrix(A.rows, B.rows);
  for (int i = 0; i < A.rows; ++i) {
    double* ci = C.row(i);
    const double* ai = A.row(i);
    for (int j = 0; j < B.rows; ++j) {
      const double* bj = B.row(j);
      double acc = 0.0;
      for (int k = 0; k < A.cols; ++k) acc += ai[k] * bj[k];
      ci[j] = acc;
    }
  }
}

void add_row_bias(Matrix& M, const Matrix& bias) {
  require(bias.rows == 1 && bias.cols == M.cols, "add_row_bias bias shape");
  for (int i = 0; i < M.rows; ++i) {
    double* mi = M.row(i);
    for (int j = 0; j < M.cols; ++j) mi[j] += bias.data[j];
  }
}

void relu_forward(const Matrix& Z, Matrix& A) {
  A = Matrix(Z.rows, Z.cols);
  for (int i = 0; i < Z.rows; ++i)
    for (int j = 0; j < Z.cols; ++j) A(i, j) = Z(i, j) > 0.0 ? Z(i, j) : 0.0;
}

void relu_backward(const Matrix& Z, const Matrix& dA, Matrix& dZ) {
  require(Z.same_shape(dA), "relu_backward Z/dA shapes");
  dZ = Matrix(Z.rows, Z.cols);
  for (int i = 0; i < Z.rows; ++i)
    for (int j = 0; j < Z.cols; ++j) dZ(i, j) = Z(i, j) > 0.0 ? dA(i, j) : 0.0;
}

void softmax_rows(const Matrix& Z, Matrix& P) {
  P = Matrix(Z.rows, Z.cols);
  for (int i = 0; i < Z.rows; ++i) {
    const double* zi = Z.row(i);
    double* pi = P.row(i);
    double mx = zi[0];
    for (int j = 1; j < Z.cols; ++j) mx = zi[j] > mx ? zi[j] : mx;
    double sum = 0.0;
    for (int j = 0; j < Z.cols; ++j) {
      pi[j] = std::exp(zi[j] - mx);
      sum += pi[j];
    }
    for (int j = 0; j < Z.cols; ++j) pi[j] /= sum;
  }
}

void col_sums(const Matrix& M, Matrix& out) {
  out = Matrix(1, M.cols);
  for (int j = 0; j < M.cols; ++j) {
    double acc = 0.0;
    for (int i = 0; i < M.rows; ++i) acc += M(i, j);
    out.data[j] = acc;
  }
}

}  // namespace bee::kernels::reference
