#pragma once

#include "bee/matrix.hpp"

// Dense kernels used by the GCN, the MLPs and the classification heads.
// The default implementations parallelize over output rows with OpenMP;
// each output element is produced by exactly one thread with a fixed
// accumulation order, so results are bit-identical to the serial
// reference implementations in kernels::reference regardless of thread
// count. The reference versions are kept for testing and benchmarking.

namespace bee::kernels {

// C = A * B
void matmul(const Matrix& A, const Matrix& B, Matrix& C);
// C = A^T * B
void matmul_at_b(const Matrix& A, const Matrix& B, Matrix& C);
// C = A * B^T
void matmul_a_bt(const Matrix& A, const Matrix& B, Matrix& C);
// M[i][:] += bias (bias is 1 x cols)
void add_row_bias(Matrix& M, const Matrix& bias);
// A = max(Z, 0)
void relu_forward(const Matrix& Z, Matrix& A);
// dZ = dA where Z > 0, else 0
void relu_backward(const Matrix& Z, const Matrix& dA, Matrix& dZ);
// P[i][:] = softmax(Z[i][:]), max-shifted for stability
void softmax_rows(const Matrix& Z, Matrix& P);
// out (1 x cols) = column sums of M
void col_sums(const Matrix& M, Matrix& out);

namespace reference {
void matmul(const Matrix& A, const Matrix& B, Matrix& C);
void matmul_at_b(const Matrix& A, const Matrix& B, Matrix& C);
void matmul_a_bt(const Matrix& A, const Matrix& B, Matrix& C);
void add_row_bias(Matrix& M, const Matrix& bias);
void relu_forward(const Matrix& Z, Matrix& A);
void relu_backward(const Matrix& Z, const Matrix& dA, Matrix& dZ);
void softmax_rows(const Matrix& Z, Matrix& P);
void col_sums(const Matrix& M, Matrix& out);
}  // namespace reference

}  // namespace bee::kernels
