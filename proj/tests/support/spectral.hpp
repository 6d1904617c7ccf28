#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "bee/matrix.hpp"

// Test-side eigensolver (the library itself never needs one).

namespace bee::testsupport {

inline double spectral_radius_symmetric(const Matrix& a) {
  Eigen::MatrixXd m(a.rows, a.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) m(i, j) = a(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  double radius = 0.0;
  for (int i = 0; i < solver.eigenvalues().size(); ++i)
    radius = std::max(radius, std::abs(solver.eigenvalues()[i]));
  return radius;
}

}  // namespace bee::testsupport
