#pragma once

// Domain types and dense block-matrix utilities shared by every module.
//
// A sequence x_0, ..., x_N of d-dimensional Gaussian vectors is described by
// the covariance of the stacked vector [x_0; ...; x_N], a square matrix of
// (N+1) x (N+1) blocks, each d x d. Block (i, j) is Cov(x_i, x_j).

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cmseq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when a symmetric triangular factorization meets a pivot at or below
/// the positivity threshold.
class NotPositiveDefinite : public std::runtime_error {
 public:
  explicit NotPositiveDefinite(std::size_t pivot_index)
      : std::runtime_error("matrix is not positive definite (pivot " +
                           std::to_string(pivot_index) + ")"),
        pivot_index_(pivot_index) {}

  std::size_t pivot_index() const noexcept { return pivot_index_; }

 private:
  std::size_t pivot_index_;
};

class NotSymmetric : public std::runtime_error {
 public:
  explicit NotSymmetric(double relative_asymmetry)
      : std::runtime_error("matrix is not symmetric (relative asymmetry " +
                           std::to_string(relative_asymmetry) + ")"),
        relative_asymmetry_(relative_asymmetry) {}

  double relative_asymmetry() const noexcept { return relative_asymmetry_; }

 private:
  double relative_asymmetry_;
};

class BoundsError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Square matrix of n_blocks x n_blocks blocks, each block_dim x block_dim.
class BlockMatrix {
 public:
  BlockMatrix() = default;
  /// Zero matrix.
  BlockMatrix(std::size_t n_blocks, std::size_t block_dim);
  BlockMatrix(Matrix data, std::size_t block_dim);

  static BlockMatrix identity(std::size_t n_blocks, std::size_t block_dim);

  std::size_t n_blocks() const noexcept { return n_blocks_; }
  std::size_t block_dim() const noexcept { return block_dim_; }
  /// Last time index N (= n_blocks - 1).
  std::size_t last_index() const noexcept { return n_blocks_ - 1; }
  std::size_t size() const noexcept { return n_blocks_ * block_dim_; }

  Matrix block(std::size_t i, std::size_t j) const;
  void set_block(std::size_t i, std::size_t j, const Matrix& value);
  void add_to_block(std::size_t i, std::size_t j, const Matrix& value);

  /// Principal submatrix over block indices [first, last].
  BlockMatrix principal(std::size_t first, std::size_t last) const;

  /// Largest Frobenius norm over all blocks.
  double max_block_norm() const;

  const Matrix& dense() const noexcept { return data_; }

  friend bool operator==(const BlockMatrix& a, const BlockMatrix& b) {
    return a.block_dim_ == b.block_dim_ && a.n_blocks_ == b.n_blocks_ &&
           a.data_ == b.data_;
  }

 private:
  void check_index(std::size_t i, std::size_t j) const;

  std::size_t n_blocks_ = 0;
  std::size_t block_dim_ = 0;
  Matrix data_;
};

/// Which endpoint of a CM interval carries the conditioning state.
enum class ConditioningSide { First, Last };

const char* to_string(ConditioningSide side) noexcept;

/// Closed integer interval [lo, hi] of time indices with lo < hi.
struct IndexInterval {
  std::size_t lo = 0;
  std::size_t hi = 0;

  /// Throws BoundsError unless 0 <= lo < hi <= last_index.
  void validate(std::size_t last_index) const;

  std::size_t conditioning_index(ConditioningSide side) const noexcept {
    return side == ConditioningSide::First ? lo : hi;
  }

  friend bool operator==(const IndexInterval&, const IndexInterval&) = default;
};

struct Tolerance {
  /// Relative threshold below which a block counts as zero.
  double zero_tol = 1e-9;
  /// Relative threshold for model-condition and partial-covariance residuals.
  double residual_tol = 1e-8;

  void validate() const;
};

/// Relative asymmetry above which input matrices are rejected rather than
/// symmetrized.
inline constexpr double kSymmetryTolerance = 1e-12;
/// Pivots at or below this fraction of the largest diagonal entry fail the
/// positive-definiteness test.
inline constexpr double kPivotThreshold = 1e-12;

/// Zero-mean nonsingular Gaussian law of [x_0, ..., x_N].
class SequenceLaw {
 public:
  /// Symmetrizes C when its asymmetry is within kSymmetryTolerance, rejects it
  /// otherwise (NotSymmetric), and checks positive definiteness.
  static SequenceLaw from_covariance(BlockMatrix covariance);

  std::size_t last_index() const noexcept { return covariance_.last_index(); }
  std::size_t dim() const noexcept { return covariance_.block_dim(); }
  const BlockMatrix& covariance() const noexcept { return covariance_; }

 private:
  explicit SequenceLaw(BlockMatrix covariance) : covariance_(std::move(covariance)) {}

  BlockMatrix covariance_;
};

/// Returns (M + M')/2, or throws NotSymmetric if M is further than
/// kSymmetryTolerance (relative, max-abs) from symmetric.
Matrix symmetrized(const Matrix& m);

/// Lower Cholesky factor L with M = L L'. Throws NotPositiveDefinite carrying
/// the scalar pivot index that fell below kPivotThreshold * max diag(M).
Matrix cholesky_lower(const Matrix& m);

Matrix invert_spd(const Matrix& m);
BlockMatrix invert_spd(const BlockMatrix& m);

/// Which side of the split survives a Schur complement.
enum class Keep { Leading, Trailing };

/// Schur complement of a symmetric positive-definite block matrix.
///
/// Leading keeps blocks [0, split] and eliminates [split+1, N]:
///   A11 - A12 A22^{-1} A12'.
/// Trailing keeps blocks [split, N] and eliminates [0, split-1]:
///   A22 - A12' A11^{-1} A12.
/// For a precision matrix the result is the precision of the marginal law of
/// the kept blocks. Requires 1 <= split <= N.
BlockMatrix schur_complement(const BlockMatrix& a, std::size_t split, Keep keep);

}  // namespace cmseq
