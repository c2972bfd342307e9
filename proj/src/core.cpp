#include "cmseq/core.hpp"

#include <algorithm>
#include <cmath>

namespace cmseq {

namespace {

Eigen::Index as_index(std::size_t n) { return static_cast<Eigen::Index>(n); }

}  // namespace

BlockMatrix::BlockMatrix(std::size_t n_blocks, std::size_t block_dim)
    : n_blocks_(n_blocks),
      block_dim_(block_dim),
      data_(Matrix::Zero(as_index(n_blocks * block_dim), as_index(n_blocks * block_dim))) {}

BlockMatrix::BlockMatrix(Matrix data, std::size_t block_dim)
    : block_dim_(block_dim), data_(std::move(data)) {
  if (block_dim == 0 || data_.rows() != data_.cols() ||
      data_.rows() % as_index(block_dim) != 0 || data_.rows() == 0) {
    throw BoundsError("block matrix data must be square with a size divisible by block_dim");
  }
  n_blocks_ = static_cast<std::size_t>(data_.rows()) / block_dim;
}

BlockMatrix BlockMatrix::identity(std::size_t n_blocks, std::size_t block_dim) {
  const auto n = as_index(n_blocks * block_dim);
  return BlockMatrix(Matrix::Identity(n, n), block_dim);
}

void BlockMatrix::check_index(std::size_t i, std::size_t j) const {
  if (i >= n_blocks_ || j >= n_blocks_) {
    throw BoundsError("block index (" + std::to_string(i) + ", " + std::to_string(j) +
                      ") out of range for " + std::to_string(n_blocks_) + " blocks");
  }
}

Matrix BlockMatrix::block(std::size_t i, std::size_t j) const {
  check_index(i, j);
  const auto d = as_index(block_dim_);
  return data_.block(as_index(i) * d, as_index(j) * d, d, d);
}

void BlockMatrix::set_block(std::size_t i, std::size_t j, const Matrix& value) {
  check_index(i, j);
  const auto d = as_index(block_dim_);
  if (value.rows() != d || value.cols() != d) throw BoundsError("block has wrong shape");
  data_.block(as_index(i) * d, as_index(j) * d, d, d) = value;
}

void BlockMatrix::add_to_block(std::size_t i, std::size_t j, const Matrix& value) {
  check_index(i, j);
  const auto d = as_index(block_dim_);
  if (value.rows() != d || value.cols() != d) throw BoundsError("block has wrong shape");
  data_.block(as_index(i) * d, as_index(j) * d, d, d) += value;
}

BlockMatrix BlockMatrix::principal(std::size_t first, std::size_t last) const {
  if (first > last) throw BoundsError("principal submatrix needs first <= last");
  check_index(first, last);
  const auto d = as_index(block_dim_);
  const auto n = as_index(last - first + 1) * d;
  return BlockMatrix(data_.block(as_index(first) * d, as_index(first) * d, n, n), block_dim_);
}

double BlockMatrix::max_block_norm() const {
  double best = 0.0;
  const auto d = as_index(block_dim_);
  for (std::size_t i = 0; i < n_blocks_; ++i) {
    for (std::size_t j = 0; j < n_blocks_; ++j) {
      best = std::max(best, data_.block(as_index(i) * d, as_index(j) * d, d, d).norm());
    }
  }
  return best;
}

const char* to_string(ConditioningSide side) noexcept {
  return side == ConditioningSide::First ? "first" : "last";
}

void IndexInterval::validate(std::size_t last_index) const {
  if (!(lo < hi && hi <= last_index)) {
    throw BoundsError("interval [" + std::to_string(lo) + ", " + std::to_string(hi) +
                      "] is not within [0, " + std::to_string(last_index) + "] with lo < hi");
  }
}

void Tolerance::validate() const {
  if (!(zero_tol > 0.0) || !(residual_tol > 0.0)) {
    throw std::invalid_argument("tolerances must be positive");
  }
}

Matrix symmetrized(const Matrix& m) {
  if (m.rows() != m.cols()) throw BoundsError("matrix is not square");
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  const double relative = scale > 0.0 ? asym / scale : 0.0;
  if (relative > kSymmetryTolerance) throw NotSymmetric(relative);
  return 0.5 * (m + m.transpose());
}

Matrix cholesky_lower(const Matrix& m) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n) throw BoundsError("matrix is not square");
  if (n == 0) return Matrix(0, 0);

  const double threshold = kPivotThreshold * m.diagonal().maxCoeff();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = m(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > threshold) || !(pivot > 0.0)) {
      throw NotPositiveDefinite(static_cast<std::size_t>(j));
    }
    const double root = std::sqrt(pivot);
    l(j, j) = root;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      l(i, j) = (m(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / root;
    }
  }
  return l;
}

Matrix invert_spd(const Matrix& m) {
  const Matrix l = cholesky_lower(m);
  const Matrix l_inv = l.triangularView<Eigen::Lower>().solve(Matrix::Identity(m.rows(), m.cols()));
  const Matrix inv = l_inv.transpose() * l_inv;
  return 0.5 * (inv + inv.transpose());
}

BlockMatrix invert_spd(const BlockMatrix& m) {
  return BlockMatrix(invert_spd(m.dense()), m.block_dim());
}

SequenceLaw SequenceLaw::from_covariance(BlockMatrix covariance) {
  BlockMatrix sym(symmetrized(covariance.dense()), covariance.block_dim());
  cholesky_lower(sym.dense());
  return SequenceLaw(std::move(sym));
}

BlockMatrix schur_complement(const BlockMatrix& a, std::size_t split, Keep keep) {
  const std::size_t last = a.last_index();
  if (split < 1 || split > last) {
    throw BoundsError("Schur complement split must lie in [1, N]");
  }
  cholesky_lower(a.dense());

  const auto d = as_index(a.block_dim());
  // Blocks [0, head_blocks) form the leading partition A11.
  const std::size_t head_blocks = keep == Keep::Leading ? split + 1 : split;
  const auto head = as_index(head_blocks) * d;
  const auto tail = as_index(a.size()) - head;
  if (tail == 0) return a;

  const Matrix& dense = a.dense();
  const Matrix a11 = dense.topLeftCorner(head, head);
  const Matrix a12 = dense.topRightCorner(head, tail);
  const Matrix a22 = dense.bottomRightCorner(tail, tail);

  Matrix result;
  if (keep == Keep::Leading) {
    result = a11 - a12 * invert_spd(a22) * a12.transpose();
  } else {
    result = a22 - a12.transpose() * invert_spd(a11) * a12;
  }
  return BlockMatrix(0.5 * (result + result.transpose()), a.block_dim());
}

}  // namespace cmseq
