#pragma once

// Conditional-independence ground truth for Gaussian sequences.
//
// For a Gaussian vector, x_a and x_b are independent given x_s iff the
// partial covariance C_ab - C_as C_ss^{-1} C_sb vanishes. Each class
// (interval-CM, reciprocal, Markov) is checked here straight from its
// conditional-distribution characterization by sweeping every query the
// characterization quantifies over. Nothing in this module looks at the
// zero pattern of the precision matrix.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cmseq/core.hpp"

namespace cmseq {

using IndexSet = std::vector<std::size_t>;

/// Sweeps refuse laws whose stacked dimension exceeds this.
inline constexpr std::size_t kMaxOracleDim = 16;

class OracleTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "Is x_target independent of x_dropped given x_retained?"
struct CiQuery {
  std::size_t target = 0;
  IndexSet retained;
  IndexSet dropped;
};

struct OracleVerdict {
  bool holds = true;
  /// Largest ||partial covariance||_F over the largest block norm of C.
  double worst_residual = 0.0;
  std::optional<CiQuery> witness;
};

/// Cov(x_a, x_b | x_s). An empty s gives the unconditional cross-covariance.
/// The index sets must be pairwise disjoint time indices.
Matrix partial_covariance(const BlockMatrix& c, const IndexSet& a, const IndexSet& b,
                          const IndexSet& s);

/// Which equivalent conditional form of the interval-CM characterization to
/// sweep: the earlier history, or the later one.
enum class HistorySide { Past, Future };

/// [lo, hi]-CM_c with c the interval endpoint selected by side. Any interval
/// with lo < hi is accepted; [0, N] gives CM_F / CM_L.
OracleVerdict oracle_cm_interval(const SequenceLaw& law, IndexInterval interval,
                                 ConditioningSide side, const Tolerance& tol,
                                 HistorySide form = HistorySide::Past);

/// x_k given the outside (x_i, i <= j or i >= l) depends only on (x_j, x_l).
OracleVerdict oracle_reciprocal(const SequenceLaw& law, const Tolerance& tol);

/// x_k given (x_0, ..., x_j) depends only on x_j.
OracleVerdict oracle_markov(const SequenceLaw& law, const Tolerance& tol);

/// The query lists the sweeps evaluate, in evaluation order.
std::vector<CiQuery> cm_interval_queries(IndexInterval interval, ConditioningSide side,
                                         HistorySide form);
std::vector<CiQuery> reciprocal_queries(std::size_t last_index);
std::vector<CiQuery> markov_queries(std::size_t last_index);

/// Evaluates a query list. The OpenMP version computes residuals concurrently
/// and reduces them in query order, so its verdict matches serial::sweep bit
/// for bit.
OracleVerdict sweep(const SequenceLaw& law, const std::vector<CiQuery>& queries,
                    const Tolerance& tol);

namespace serial {
OracleVerdict sweep(const SequenceLaw& law, const std::vector<CiQuery>& queries,
                    const Tolerance& tol);
}  // namespace serial

}  // namespace cmseq
