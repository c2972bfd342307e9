#include "cmseq/structure.hpp"

namespace cmseq {

const char* to_string(PatternKind kind) noexcept {
  switch (kind) {
    case PatternKind::Tridiagonal: return "tridiagonal";
    case PatternKind::CyclicTridiagonal: return "cyclic_tridiagonal";
    case PatternKind::CmL: return "cm_l";
    case PatternKind::CmF: return "cm_f";
    case PatternKind::CmLWithCmFTail: return "cm_l_with_cm_f_tail";
  }
  return "unknown";
}

bool in_support(const PatternSpec& pattern, std::size_t i, std::size_t j) {
  const std::size_t n = pattern.last_index;
  if (i > n || j > n) throw BoundsError("block index outside pattern");
  if (i > j) std::swap(i, j);
  if (j - i <= 1) return true;

  switch (pattern.kind) {
    case PatternKind::Tridiagonal:
      return false;
    case PatternKind::CyclicTridiagonal:
      return i == 0 && j == n;
    case PatternKind::CmL:
      return j == n;
    case PatternKind::CmF:
      return i == 0;
    case PatternKind::CmLWithCmFTail:
      // D_i sits at (i, N); D_{k1+1}..D_{N-2} are forced to zero.
      return j == n && !(i >= pattern.k1 + 1 && i + 2 <= n);
  }
  return false;
}

std::set<BlockIndex> allowed_support(const PatternSpec& pattern) {
  std::set<BlockIndex> support;
  for (std::size_t i = 0; i <= pattern.last_index; ++i) {
    for (std::size_t j = 0; j <= pattern.last_index; ++j) {
      if (in_support(pattern, i, j)) support.emplace(i, j);
    }
  }
  return support;
}

PatternWitness detect(const BlockMatrix& m, const PatternSpec& pattern, const Tolerance& tol) {
  tol.validate();
  if (m.n_blocks() == 0 || pattern.last_index != m.last_index()) {
    throw BoundsError("pattern size does not match matrix");
  }
  const double scale = m.max_block_norm();

  PatternWitness witness;
  double worst_norm = -1.0;
  for (std::size_t i = 0; i <= pattern.last_index; ++i) {
    for (std::size_t j = 0; j <= pattern.last_index; ++j) {
      if (in_support(pattern, i, j)) continue;
      const double norm = m.block(i, j).norm();
      if (norm > worst_norm) {
        worst_norm = norm;
        witness.worst_block = BlockIndex{i, j};
      }
    }
  }
  if (witness.worst_block) {
    witness.worst_ratio = scale > 0.0 ? worst_norm / scale : 0.0;
  }
  witness.conforms = witness.worst_ratio <= tol.zero_tol;
  return witness;
}

}  // namespace cmseq
