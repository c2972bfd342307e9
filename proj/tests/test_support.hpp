#pragma once

// Fixtures and independent reference computations shared by the tests.

#include <cmath>
#include <cstdint>
#include <random>

#include "cmseq/core.hpp"

namespace cmseq::testing {

/// Stationary scalar AR(1) covariance C_ij = a^{|i-j|}, written out entrywise.
inline BlockMatrix ar1_covariance(double a, std::size_t last_index) {
  const auto n = static_cast<Eigen::Index>(last_index + 1);
  Matrix c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) c(i, j) = std::pow(a, std::abs(static_cast<double>(i - j)));
  }
  return BlockMatrix(c, 1);
}

inline SequenceLaw ar1_law(double a, std::size_t last_index) {
  return SequenceLaw::from_covariance(ar1_covariance(a, last_index));
}

/// Scalar N = 3 cyclic tridiagonal precision: diagonal 2, band -0.5, corner -0.3.
inline BlockMatrix cyclic_fixture_precision() {
  Matrix a(4, 4);
  a << 2.0, -0.5, 0.0, -0.3,
      -0.5, 2.0, -0.5, 0.0,
       0.0, -0.5, 2.0, -0.5,
      -0.3, 0.0, -0.5, 2.0;
  return BlockMatrix(a, 1);
}

/// The cyclic fixture plus a (1,3) coupling of -0.2: CM_L but not CM_F.
inline BlockMatrix cml_fixture_precision() {
  BlockMatrix a = cyclic_fixture_precision();
  Matrix m = a.dense();
  m(1, 3) = m(3, 1) = -0.2;
  return BlockMatrix(m, 1);
}

/// Law with the given precision; the inverse is taken with a pivoted LU so it
/// does not share code with the library's SPD inverse.
inline SequenceLaw law_from_precision(const BlockMatrix& precision) {
  const Matrix c = precision.dense().fullPivLu().inverse();
  return SequenceLaw::from_covariance(BlockMatrix(0.5 * (c + c.transpose()), precision.block_dim()));
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

/// B B' + n I for a standard normal B: symmetric positive definite and
/// comfortably conditioned.
inline Matrix random_spd(Eigen::Index n, std::mt19937_64& rng) {
  const Matrix b = random_matrix(n, n, rng);
  Matrix m = b * b.transpose() + static_cast<double>(n) * Matrix::Identity(n, n);
  return 0.5 * (m + m.transpose());
}

inline double relative_error(const Matrix& got, const Matrix& want) {
  const double scale = want.norm();
  return scale > 0.0 ? (got - want).norm() / scale : (got - want).norm();
}

}  // namespace cmseq::testing
