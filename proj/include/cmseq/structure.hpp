#pragma once

// Zero-block patterns of precision matrices and tolerance-based detection.

#include <optional>
#include <set>
#include <utility>

#include "cmseq/core.hpp"

namespace cmseq {

enum class PatternKind {
  Tridiagonal,        // Markov
  CyclicTridiagonal,  // tridiagonal plus the (0, N) corner: reciprocal
  CmL,                // tridiagonal plus last block row/column
  CmF,                // tridiagonal plus first block row/column
  CmLWithCmFTail,     // CmL with D_k = 0 for k1+1 <= k <= N-2
};

const char* to_string(PatternKind kind) noexcept;

struct PatternSpec {
  PatternKind kind = PatternKind::Tridiagonal;
  /// Last block index of the matrices this pattern applies to.
  std::size_t last_index = 0;
  /// Only meaningful for CmLWithCmFTail.
  std::size_t k1 = 0;

  static PatternSpec tridiagonal(std::size_t n) { return {PatternKind::Tridiagonal, n, 0}; }
  static PatternSpec cyclic_tridiagonal(std::size_t n) {
    return {PatternKind::CyclicTridiagonal, n, 0};
  }
  static PatternSpec cm_l(std::size_t n) { return {PatternKind::CmL, n, 0}; }
  static PatternSpec cm_f(std::size_t n) { return {PatternKind::CmF, n, 0}; }
  static PatternSpec cm_c(ConditioningSide side, std::size_t n) {
    return side == ConditioningSide::Last ? cm_l(n) : cm_f(n);
  }
  static PatternSpec cm_l_with_cm_f_tail(std::size_t n, std::size_t k1) {
    return {PatternKind::CmLWithCmFTail, n, k1};
  }
};

/// True iff block (i, j) may be nonzero under the pattern.
bool in_support(const PatternSpec& pattern, std::size_t i, std::size_t j);

using BlockIndex = std::pair<std::size_t, std::size_t>;

/// Every block index pair the pattern allows to be nonzero. Always symmetric.
std::set<BlockIndex> allowed_support(const PatternSpec& pattern);

struct PatternWitness {
  bool conforms = true;
  /// Largest off-support block, scanned row-major; empty when the pattern
  /// allows every block.
  std::optional<BlockIndex> worst_block;
  /// Frobenius norm of worst_block over the largest block norm of the matrix.
  double worst_ratio = 0.0;
};

/// Checks that every block outside the pattern's support is zero to within
/// tol.zero_tol times the largest block norm of m.
PatternWitness detect(const BlockMatrix& m, const PatternSpec& pattern, const Tolerance& tol);

}  // namespace cmseq
