#pragma once

// Sequence-class verdicts from the zero-block structure of the precision
// matrix A = C^{-1} and of its Schur complements.
//
//   CM_L / CM_F         A has the CmL / CmF pattern
//   [0,k2]-CM_c         the leading Schur complement over [0,k2] has the CM_c
//                       pattern (sized to the interval)
//   [k1,N]-CM_c         the trailing Schur complement over [k1,N] does
//   reciprocal          A is cyclic tridiagonal  (equivalently CM_L and CM_F)
//   Markov              A is tridiagonal

#include <stdexcept>
#include <vector>

#include "cmseq/core.hpp"
#include "cmseq/structure.hpp"

namespace cmseq {

/// Only intervals anchored at 0 or N (and not both) have a Schur-complement
/// characterization.
class UnsupportedInterval : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ClassVerdict {
  bool holds = false;
  PatternWitness witness;
};

struct ReciprocalVerdict {
  bool holds = false;
  /// Cyclic-tridiagonal detection on A.
  PatternWitness witness;
  /// CM_L and CM_F computed separately.
  bool cm_l_and_cm_f = false;
  bool routes_agree = false;
};

struct IntervalVerdict {
  IndexInterval interval;
  ConditioningSide side = ConditioningSide::First;
  ClassVerdict verdict;
};

struct ClassificationReport {
  std::size_t last_index = 0;
  std::size_t dim = 0;
  ClassVerdict markov;
  ReciprocalVerdict reciprocal;
  ClassVerdict cm_l;
  ClassVerdict cm_f;
  std::vector<IntervalVerdict> interval_cm;
  /// Both reciprocal routes agree and verify_composition holds.
  bool consistency = false;
};

ClassVerdict classify_cmc(const SequenceLaw& law, ConditioningSide side, const Tolerance& tol);

/// Throws UnsupportedInterval unless the interval is [0, k2] with
/// 1 <= k2 <= N-1 or [k1, N] with 1 <= k1 <= N-1.
ClassVerdict classify_cm_interval(const SequenceLaw& law, IndexInterval interval,
                                  ConditioningSide side, const Tolerance& tol);

ReciprocalVerdict classify_reciprocal(const SequenceLaw& law, const Tolerance& tol);
ClassVerdict classify_markov(const SequenceLaw& law, const Tolerance& tol);

/// Checks that the reciprocal verdict agrees with both CM compositions:
///   [k1,N]-CM_F for every k1, plus CM_F and CM_L;
///   [0,k2]-CM_L for every k2, plus CM_L and CM_F.
bool verify_composition(const SequenceLaw& law, const Tolerance& tol);

/// Every boundary-anchored interval with both conditioning sides, in the
/// order full_report lists them: [0,k2] for k2 = 1..N-1, then [k1,N] for
/// k1 = 1..N-1; First before Last for each.
std::vector<std::pair<IndexInterval, ConditioningSide>> boundary_anchored_intervals(
    std::size_t last_index);

ClassificationReport full_report(const SequenceLaw& law, const Tolerance& tol);

/// Same as full_report with the interval fan-out evaluated sequentially.
namespace serial {
ClassificationReport full_report(const SequenceLaw& law, const Tolerance& tol);
}  // namespace serial

}  // namespace cmseq
