#pragma once

// White-noise-driven CM_c dynamic models.
//
// Forward model, c in {0, N}:
//   x_k = G_{k,k-1} x_{k-1} + G_{k,c} x_c + e_k,   k in (0,N] \ {c}
// with boundary
//   c = N, BC1:  x_0 = e_0,  x_N = G_{N,0} x_0 + e_N
//   c = N, BC2:  x_N = e_N,  x_0 = G_{0,N} x_N + e_0
//   c = 0:       x_0 = e_0
//
// Backward model, c in {0, N}:
//   x_k = G^B_{k,k+1} x_{k+1} + G^B_{k,c} x_c + e^B_k,   k in [0,N) \ {c}
// with boundary
//   c = 0, BC1:  x_N = e_N,  x_0 = G^B_{0,N} x_N + e_0
//   c = 0, BC2:  x_0 = e_0,  x_N = G^B_{N,0} x_0 + e_N
//   c = N:       x_N = e_N
//
// e_k is white Gaussian with covariance G_k. The precision of the stacked
// sequence is A = 𝒢' G^{-1} 𝒢 with G = diag(G_0..G_N) and 𝒢 the unit
// block matrix carrying the negated gains.

#include <cstdint>
#include <optional>
#include <vector>

#include "cmseq/core.hpp"

namespace cmseq {

enum class BoundaryCondition { BC1, BC2 };
enum class Direction { Forward, Backward };

const char* to_string(BoundaryCondition bc) noexcept;
const char* to_string(Direction direction) noexcept;

/// Parameters shared by both directions. Per-time vectors have N+1 entries;
/// trans/cond entries outside the model's recursion range are empty (0x0).
struct CmcModel {
  std::size_t last_index = 0;
  std::size_t dim = 0;
  ConditioningSide side = ConditioningSide::Last;
  BoundaryCondition bc = BoundaryCondition::BC1;
  /// Forward: G_{k,k-1}. Backward: G^B_{k,k+1}.
  std::vector<Matrix> trans;
  /// G_{k,c} (or G^B_{k,c}).
  std::vector<Matrix> cond;
  /// Noise covariances G_k, defined for every k.
  std::vector<Matrix> noise;
  /// Forward: G_{N,0} (BC1) or G_{0,N} (BC2), only for c = N.
  /// Backward: G^B_{0,N} (BC1) or G^B_{N,0} (BC2), only for c = 0.
  std::optional<Matrix> boundary_gain;

  std::size_t conditioning_index() const noexcept {
    return side == ConditioningSide::First ? 0 : last_index;
  }
};

struct ForwardCmcModel : CmcModel {};
struct BackwardCmcModel : CmcModel {};

/// Time indices driven by the recursion (not the boundary condition).
std::vector<std::size_t> recursion_indices(Direction direction, std::size_t last_index,
                                           ConditioningSide side);

/// Whether (direction, side, bc) is one of the model variants that exist.
bool is_valid_variant(Direction direction, ConditioningSide side, BoundaryCondition bc) noexcept;

/// Throws std::invalid_argument on inconsistent shapes or an invalid variant;
/// NotPositiveDefinite if a noise covariance is not SPD.
void validate(const CmcModel& model, Direction direction);

/// Gains are Gaussian regression coefficients of x_k on (x_{k-1}, x_c) and
/// noise covariances the matching residual covariances. When x_{k-1} and x_c
/// coincide (k = 1, c = 0) the gain is split equally between the two terms.
/// Throws std::invalid_argument for BC2 with c = 0.
ForwardCmcModel build_forward(const SequenceLaw& law, ConditioningSide side,
                              BoundaryCondition bc = BoundaryCondition::BC1);
/// Mirror of build_forward in time; BC2 is only valid with c = 0.
BackwardCmcModel build_backward(const SequenceLaw& law, ConditioningSide side,
                                BoundaryCondition bc = BoundaryCondition::BC1);

BlockMatrix assemble_script_g(const ForwardCmcModel& model);
BlockMatrix assemble_script_g(const BackwardCmcModel& model);

/// A = 𝒢' G^{-1} 𝒢.
BlockMatrix assemble_precision(const ForwardCmcModel& model);
BlockMatrix assemble_precision(const BackwardCmcModel& model);

SequenceLaw model_covariance(const ForwardCmcModel& model);
SequenceLaw model_covariance(const BackwardCmcModel& model);

struct ConditionCheck {
  bool holds = true;
  /// Largest residual norm over the largest ||G_k^{-1}||_F of the model.
  double max_residual = 0.0;
  /// Time index of the largest residual; empty when nothing was checked.
  std::optional<std::size_t> worst_index;
};

/// G_k^{-1} G_{k,c} = G_{k+1,k}' G_{k+1}^{-1} G_{k+1,c} for k in (0,N-1)
/// when c = N and k in (1,N) when c = 0 (open integer intervals).
ConditionCheck check_reciprocity(const ForwardCmcModel& model, const Tolerance& tol);

/// (G^B_{k+1})^{-1} G^B_{k+1,c} = (G^B_{k,k+1})' (G^B_k)^{-1} G^B_{k,c} for
/// k in (0,N-1) when c = 0 and k in [0,N-2) when c = N.
ConditionCheck check_reciprocity(const BackwardCmcModel& model, const Tolerance& tol);

/// The boundary identity that, on top of reciprocity, makes the model Markov:
///   c = N, BC1:  G_N^{-1} G_{N,0} = G_{1,N}' G_1^{-1} G_{1,0}
///   c = N, BC2:  G_0^{-1} G_{0,N} = G_{1,0}' G_1^{-1} G_{1,N}
///   c = 0:       G_{N,0} = 0  (tested as G_N^{-1} G_{N,0} = 0)
ConditionCheck check_markov(const ForwardCmcModel& model, const Tolerance& tol);

///   c = 0, BC1:  (G^B_0)^{-1} G^B_{0,N} = (G^B_{N-1,0})' (G^B_{N-1})^{-1} G^B_{N-1,N}
///   c = 0, BC2:  (G^B_N)^{-1} G^B_{N,0} = (G^B_{N-1,N})' (G^B_{N-1})^{-1} G^B_{N-1,0}
///   c = N:       G^B_{0,N} = 0  (tested as (G^B_0)^{-1} G^B_{0,N} = 0)
ConditionCheck check_markov(const BackwardCmcModel& model, const Tolerance& tol);

enum class LawClass { Markov, Reciprocal, CmLOnly, CmFOnly, Generic };

const char* to_string(LawClass cls) noexcept;

/// Seeded precision matrix with exact zeros off the class's support.
/// Off-diagonal on-support entries are uniform in [-0.5, 0.5]; each diagonal
/// block is (largest absolute off-diagonal row sum in its block row + 1) I.
/// Reciprocal laws get a corner block of norm >= 0.1; CmLOnly (CmFOnly) laws
/// get at least one D_k, 1 <= k <= N-2, of norm >= 0.1 in the last (first)
/// block column. Requires N >= 2, and N >= 3 for CmLOnly/CmFOnly.
BlockMatrix random_precision(LawClass cls, std::size_t last_index, std::size_t dim,
                             std::uint64_t seed);

/// Law whose covariance is the inverse of random_precision(...).
SequenceLaw random_law(LawClass cls, std::size_t last_index, std::size_t dim,
                       std::uint64_t seed);

}  // namespace cmseq
