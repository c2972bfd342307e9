#include "doctest.h"

#include <omp.h>

#include "cmseq/classify.hpp"
#include "cmseq/models.hpp"
#include "cmseq/oracle.hpp"
#include "test_support.hpp"

using namespace cmseq;
using namespace cmseq::testing;

namespace {

constexpr LawClass kClasses[] = {LawClass::Markov, LawClass::Reciprocal, LawClass::CmLOnly,
                                 LawClass::CmFOnly, LawClass::Generic};

bool same_witness(const PatternWitness& a, const PatternWitness& b) {
  return a.conforms == b.conforms && a.worst_block == b.worst_block && a.worst_ratio == b.worst_ratio;
}

bool same_report(const ClassificationReport& a, const ClassificationReport& b) {
  if (a.interval_cm.size() != b.interval_cm.size()) return false;
  for (std::size_t i = 0; i < a.interval_cm.size(); ++i) {
    const auto& x = a.interval_cm[i];
    const auto& y = b.interval_cm[i];
    if (!(x.interval == y.interval) || x.side != y.side || x.verdict.holds != y.verdict.holds ||
        !same_witness(x.verdict.witness, y.verdict.witness)) {
      return false;
    }
  }
  return a.markov.holds == b.markov.holds && same_witness(a.markov.witness, b.markov.witness) &&
         a.reciprocal.holds == b.reciprocal.holds &&
         same_witness(a.reciprocal.witness, b.reciprocal.witness) &&
         a.cm_l.holds == b.cm_l.holds && a.cm_f.holds == b.cm_f.holds &&
         a.consistency == b.consistency;
}

// Precision with the CM_F pattern at N = 3 whose only off-band block besides
// the corner is (0, 2).
BlockMatrix cmf_with_head_coupling() {
  Matrix a(4, 4);
  a << 2.0, -0.5, -0.4, -0.3,
      -0.5, 2.0, -0.5, 0.0,
      -0.4, -0.5, 2.0, -0.5,
      -0.3, 0.0, -0.5, 2.0;
  return BlockMatrix(a, 1);
}

}  // namespace

TEST_SUITE("classify") {

TEST_CASE("class verdicts on fixtures") {
  const Tolerance tol;
  SUBCASE("white noise is in every class") {
    const SequenceLaw white = SequenceLaw::from_covariance(BlockMatrix::identity(5, 2));
    const ClassificationReport r = full_report(white, tol);
    CHECK(r.markov.holds);
    CHECK(r.reciprocal.holds);
    CHECK(r.cm_l.holds);
    CHECK(r.cm_f.holds);
    for (const auto& iv : r.interval_cm) CHECK(iv.verdict.holds);
    CHECK(r.consistency);
  }
  SUBCASE("AR(1) is Markov") {
    const ClassificationReport r = full_report(ar1_law(0.5, 4), tol);
    CHECK(r.markov.holds);
    CHECK(r.reciprocal.holds);
    CHECK(r.consistency);
  }
  SUBCASE("cyclic fixture is reciprocal, not Markov") {
    const SequenceLaw law = law_from_precision(cyclic_fixture_precision());
    CHECK_FALSE(classify_markov(law, tol).holds);
    const ReciprocalVerdict r = classify_reciprocal(law, tol);
    CHECK(r.holds);
    CHECK(r.cm_l_and_cm_f);
    CHECK(r.routes_agree);
  }
  SUBCASE("CM_L fixture is CM_L only") {
    const SequenceLaw law = law_from_precision(cml_fixture_precision());
    CHECK(classify_cmc(law, ConditioningSide::Last, tol).holds);
    const ClassVerdict f = classify_cmc(law, ConditioningSide::First, tol);
    CHECK_FALSE(f.holds);
    CHECK(*f.witness.worst_block == BlockIndex{1, 3});
    CHECK_FALSE(classify_reciprocal(law, tol).holds);
    CHECK(full_report(law, tol).consistency);
  }
}

TEST_CASE("interval verdict from a Schur complement") {
  // Tridiagonal plus a (1,3) coupling, N = 4. Marginalizing x_4 leaves a 4-block
  // precision whose (1,3) block blocks the CM_F pattern on [0,3].
  Matrix a = Matrix::Zero(5, 5);
  a.diagonal().setConstant(2.0);
  for (int k = 0; k < 4; ++k) a(k, k + 1) = a(k + 1, k) = -0.5;
  a(1, 3) = a(3, 1) = -0.3;
  const SequenceLaw law = law_from_precision(BlockMatrix(a, 1));
  const Tolerance tol;
  CHECK_FALSE(classify_cm_interval(law, {0, 3}, ConditioningSide::First, tol).holds);
  CHECK_FALSE(oracle_cm_interval(law, {0, 3}, ConditioningSide::First, tol).holds);
  CHECK(classify_cm_interval(law, {0, 3}, ConditioningSide::Last, tol).holds);
  CHECK(oracle_cm_interval(law, {0, 3}, ConditioningSide::Last, tol).holds);
}

TEST_CASE("only boundary-anchored intervals are classified") {
  const SequenceLaw law = ar1_law(0.5, 4);
  const Tolerance tol;
  CHECK_THROWS_AS(classify_cm_interval(law, {1, 3}, ConditioningSide::First, tol), UnsupportedInterval);
  CHECK_THROWS_AS(classify_cm_interval(law, {0, 4}, ConditioningSide::First, tol), UnsupportedInterval);
  CHECK_THROWS_AS(classify_cm_interval(law, {2, 5}, ConditioningSide::First, tol), BoundsError);

  const auto plan = boundary_anchored_intervals(4);
  REQUIRE(plan.size() == 12);
  CHECK(plan.front().first == IndexInterval{0, 1});
  CHECK(plan.front().second == ConditioningSide::First);
  CHECK(plan.back().first == IndexInterval{3, 4});
  CHECK(plan.back().second == ConditioningSide::Last);
}

TEST_CASE("structural verdicts match the oracle on random laws") {
  const Tolerance tol;
  std::uint64_t seed = 1000;
  for (LawClass cls : kClasses) {
    for (std::size_t n = 3; n <= 6; ++n) {
      for (std::size_t d : {1u, 2u}) {
        if ((n + 1) * d > kMaxOracleDim) continue;
        const SequenceLaw law = random_law(cls, n, d, ++seed);
        const ClassificationReport r = full_report(law, tol);
        CHECK(r.consistency);
        CHECK(r.markov.holds == oracle_markov(law, tol).holds);
        CHECK(r.reciprocal.holds == oracle_reciprocal(law, tol).holds);
        CHECK(r.cm_l.holds == oracle_cm_interval(law, {0, n}, ConditioningSide::Last, tol).holds);
        CHECK(r.cm_f.holds == oracle_cm_interval(law, {0, n}, ConditioningSide::First, tol).holds);
        for (const auto& iv : r.interval_cm) {
          CHECK(iv.verdict.holds == oracle_cm_interval(law, iv.interval, iv.side, tol).holds);
        }
        // The generator's intended class.
        CHECK(r.markov.holds == (cls == LawClass::Markov));
        CHECK(r.reciprocal.holds == (cls == LawClass::Markov || cls == LawClass::Reciprocal));
        CHECK(r.cm_l.holds == (cls != LawClass::CmFOnly && cls != LawClass::Generic));
        CHECK(r.cm_f.holds == (cls != LawClass::CmLOnly && cls != LawClass::Generic));
      }
    }
  }
}

TEST_CASE("class lattice: Markov implies reciprocal implies CM_L and CM_F") {
  const Tolerance tol;
  std::uint64_t seed = 2000;
  for (int trial = 0; trial < 100; ++trial) {
    const LawClass cls = kClasses[trial % 5];
    const SequenceLaw law = random_law(cls, 3 + static_cast<std::size_t>(trial % 6), 1 + trial % 3, ++seed);
    const ClassificationReport r = full_report(law, tol);
    CHECK((!r.markov.holds || r.reciprocal.holds));
    CHECK(r.reciprocal.holds == (r.cm_l.holds && r.cm_f.holds));
    CHECK(verify_composition(law, tol));
  }
}

TEST_CASE("CM_L plus a trailing CM_F interval is the CM_L pattern with a zero tail") {
  const Tolerance tol;
  std::uint64_t seed = 3000;
  for (std::size_t n = 4; n <= 7; ++n) {
    for (std::size_t k1 = 1; k1 + 1 <= n; ++k1) {
      // Zero the tail of a CM_L precision; diagonal dominance survives.
      BlockMatrix a = random_precision(LawClass::CmLOnly, n, 1, ++seed);
      for (std::size_t k = k1 + 1; k + 2 <= n; ++k) {
        a.set_block(k, n, Matrix::Zero(1, 1));
        a.set_block(n, k, Matrix::Zero(1, 1));
      }
      const SequenceLaw law = law_from_precision(a);
      const bool pattern = detect(invert_spd(law.covariance()), PatternSpec::cm_l_with_cm_f_tail(n, k1), tol).conforms;
      CHECK(pattern);
      const bool classes = classify_cmc(law, ConditioningSide::Last, tol).holds &&
                           classify_cm_interval(law, {k1, n}, ConditioningSide::First, tol).holds;
      CHECK(classes == pattern);
      CHECK(oracle_cm_interval(law, {k1, n}, ConditioningSide::First, tol).holds);

      // A nonzero D_{k1+1} breaks the trailing interval property.
      if (k1 + 3 <= n) {
        a.set_block(k1 + 1, n, Matrix::Constant(1, 1, -0.3));
        a.set_block(n, k1 + 1, Matrix::Constant(1, 1, -0.3));
        a.set_block(n, n, a.block(n, n) + Matrix::Constant(1, 1, 0.3));
        a.set_block(k1 + 1, k1 + 1, a.block(k1 + 1, k1 + 1) + Matrix::Constant(1, 1, 0.3));
        const SequenceLaw broken = law_from_precision(a);
        CHECK_FALSE(classify_cm_interval(broken, {k1, n}, ConditioningSide::First, tol).holds);
        CHECK_FALSE(oracle_cm_interval(broken, {k1, n}, ConditioningSide::First, tol).holds);
      }
    }
  }
}

TEST_CASE("CM_F with every trailing CM_F interval is still not reciprocal without CM_L") {
  const Tolerance tol;
  const SequenceLaw law = law_from_precision(cmf_with_head_coupling());
  CHECK(classify_cmc(law, ConditioningSide::First, tol).holds);
  for (std::size_t k1 = 1; k1 <= 2; ++k1) {
    CHECK(classify_cm_interval(law, {k1, 3}, ConditioningSide::First, tol).holds);
    CHECK(oracle_cm_interval(law, {k1, 3}, ConditioningSide::First, tol).holds);
  }
  CHECK_FALSE(classify_cmc(law, ConditioningSide::Last, tol).holds);
  CHECK_FALSE(classify_reciprocal(law, tol).holds);
  CHECK_FALSE(oracle_reciprocal(law, tol).holds);
  CHECK(verify_composition(law, tol));
}

TEST_CASE("verdicts are invariant to scaling the law") {
  const Tolerance tol;
  std::uint64_t seed = 4000;
  for (LawClass cls : kClasses) {
    const SequenceLaw law = random_law(cls, 5, 2, ++seed);
    for (double alpha : {1e-3, 42.0}) {
      const SequenceLaw scaled = SequenceLaw::from_covariance(BlockMatrix(alpha * law.covariance().dense(), 2));
      const ClassificationReport a = full_report(law, tol);
      const ClassificationReport b = full_report(scaled, tol);
      CHECK(a.markov.holds == b.markov.holds);
      CHECK(a.reciprocal.holds == b.reciprocal.holds);
      CHECK(a.cm_l.holds == b.cm_l.holds);
      CHECK(a.cm_f.holds == b.cm_f.holds);
      for (std::size_t i = 0; i < a.interval_cm.size(); ++i) {
        CHECK(a.interval_cm[i].verdict.holds == b.interval_cm[i].verdict.holds);
      }
    }
  }
}

TEST_CASE("parallel report equals the serial report") {
  const Tolerance tol;
  const int saved = omp_get_max_threads();
  std::uint64_t seed = 5000;
  for (LawClass cls : kClasses) {
    const SequenceLaw law = random_law(cls, 8, 2, ++seed);
    const ClassificationReport reference = serial::full_report(law, tol);
    for (int threads : {1, 4}) {
      omp_set_num_threads(threads);
      CHECK(same_report(full_report(law, tol), reference));
    }
  }
  omp_set_num_threads(saved);
}

}  // TEST_SUITE
