#include "doctest.h"

#include <random>

#include "cmseq/core.hpp"
#include "test_support.hpp"

using namespace cmseq;
using namespace cmseq::testing;

TEST_SUITE("core") {

TEST_CASE("block accessor returns the addressed slice") {
  const BlockMatrix id = BlockMatrix::identity(4, 1);
  CHECK(id.block(0, 0)(0, 0) == 1.0);
  CHECK(id.block(0, 1)(0, 0) == 0.0);

  // C_{1,3} = a^2 for a = 0.5.
  CHECK(ar1_covariance(0.5, 3).block(1, 3)(0, 0) == doctest::Approx(0.25).epsilon(1e-15));

  Matrix m(4, 4);
  for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = i;
  const BlockMatrix b(m, 2);
  CHECK(b.n_blocks() == 2);
  CHECK(b.last_index() == 1);
  Matrix expected(2, 2);
  expected << 10, 11, 14, 15;
  CHECK(b.block(1, 1) == expected);
}

TEST_CASE("block index out of range is a bounds error") {
  const BlockMatrix id = BlockMatrix::identity(3, 2);
  CHECK_THROWS_AS(id.block(3, 0), BoundsError);
  CHECK_THROWS_AS(id.block(0, 7), BoundsError);
  CHECK_THROWS_AS(BlockMatrix(Matrix::Identity(5, 5), 2), BoundsError);
}

TEST_CASE("reassembling every block reproduces the matrix exactly") {
  std::mt19937_64 rng(3);
  for (std::size_t d : {1u, 2u, 3u}) {
    const BlockMatrix m(random_matrix(static_cast<Eigen::Index>(4 * d), static_cast<Eigen::Index>(4 * d), rng), d);
    BlockMatrix rebuilt(m.n_blocks(), d);
    for (std::size_t i = 0; i < m.n_blocks(); ++i) {
      for (std::size_t j = 0; j < m.n_blocks(); ++j) rebuilt.set_block(i, j, m.block(i, j));
    }
    CHECK(rebuilt == m);
  }
}

TEST_CASE("invert_spd on trivial inputs") {
  CHECK(invert_spd(Matrix::Identity(3, 3)).isApprox(Matrix::Identity(3, 3), 1e-15));
  CHECK(invert_spd(Matrix(2.0 * Matrix::Identity(4, 4))).isApprox(0.5 * Matrix::Identity(4, 4), 1e-15));
}

TEST_CASE("invert_spd of the AR(1) covariance is the stationary AR(1) precision") {
  const double a = 0.5;
  const Matrix c = ar1_covariance(a, 3).dense();
  const Matrix got = invert_spd(c);

  // Reference: pivoted LU inverse, then the closed form.
  const Matrix lu = c.fullPivLu().inverse();
  const double s = 1.0 / (1.0 - a * a);
  Matrix closed = Matrix::Zero(4, 4);
  closed.diagonal() << s, (1 + a * a) * s, (1 + a * a) * s, s;
  for (int i = 0; i < 3; ++i) closed(i, i + 1) = closed(i + 1, i) = -a * s;

  CHECK(relative_error(lu, closed) < 1e-14);
  CHECK(relative_error(got, closed) < 1e-14);
  CHECK((c * got - Matrix::Identity(4, 4)).norm() <= 1e-10 * c.norm());
}

TEST_CASE("non-positive pivot reports its index") {
  Matrix m(3, 3);
  m << 1, 0, 0,
       0, 1, 2,
       0, 2, 1;
  try {
    invert_spd(m);
    FAIL("expected NotPositiveDefinite");
  } catch (const NotPositiveDefinite& e) {
    CHECK(e.pivot_index() == 2);
  }
  Matrix z = Matrix::Identity(2, 2);
  z(0, 0) = 0.0;
  CHECK_THROWS_AS(cholesky_lower(z), NotPositiveDefinite);
}

TEST_CASE("input symmetry: round-off is symmetrized, real asymmetry is rejected") {
  Matrix c = ar1_covariance(0.5, 2).dense();
  c(0, 1) += 1e-14;
  const SequenceLaw law = SequenceLaw::from_covariance(BlockMatrix(c, 1));
  CHECK(law.covariance().dense() == law.covariance().dense().transpose());

  c(0, 1) += 1e-6;
  CHECK_THROWS_AS(SequenceLaw::from_covariance(BlockMatrix(c, 1)), NotSymmetric);

  Matrix indefinite(2, 2);
  indefinite << 1, 2, 2, 1;
  CHECK_THROWS_AS(SequenceLaw::from_covariance(BlockMatrix(indefinite, 1)), NotPositiveDefinite);
}

TEST_CASE("invert_spd is an involution on random SPD matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + trial % 16);
    const Matrix m = random_spd(n, rng);
    CHECK(relative_error(invert_spd(invert_spd(m)), m) < 1e-9);
    CHECK((m * invert_spd(m) - Matrix::Identity(n, n)).norm() <= 1e-10 * m.norm());
  }
}

TEST_CASE("Schur complement examples") {
  SUBCASE("zero coupling leaves the kept block unchanged") {
    std::mt19937_64 rng(5);
    Matrix a = Matrix::Zero(6, 6);
    const Matrix a11 = random_spd(4, rng);
    a.topLeftCorner(4, 4) = a11;
    a.bottomRightCorner(2, 2) = random_spd(2, rng);
    const BlockMatrix s = schur_complement(BlockMatrix(a, 2), 1, Keep::Leading);
    CHECK(s.dense() == a11);
  }
  SUBCASE("identity stays identity") {
    const BlockMatrix id = BlockMatrix::identity(5, 2);
    for (std::size_t split = 1; split <= 4; ++split) {
      const BlockMatrix lead = schur_complement(id, split, Keep::Leading);
      const BlockMatrix tail = schur_complement(id, split, Keep::Trailing);
      CHECK(lead == BlockMatrix::identity(split + 1, 2));
      CHECK(tail == BlockMatrix::identity(5 - split, 2));
    }
  }
  SUBCASE("AR(1) precision, split 2, is the precision of (x0, x1, x2)") {
    const BlockMatrix c = ar1_covariance(0.5, 3);
    const BlockMatrix s = schur_complement(invert_spd(c), 2, Keep::Leading);
    const Matrix marginal = c.dense().topLeftCorner(3, 3).fullPivLu().inverse();
    CHECK(relative_error(s.dense(), marginal) < 1e-12);
  }
  SUBCASE("bad split and non-SPD input") {
    CHECK_THROWS_AS(schur_complement(BlockMatrix::identity(3, 1), 0, Keep::Leading), BoundsError);
    CHECK_THROWS_AS(schur_complement(BlockMatrix::identity(3, 1), 3, Keep::Trailing), BoundsError);
    Matrix bad = Matrix::Identity(3, 3);
    bad(2, 2) = -1.0;
    CHECK_THROWS_AS(schur_complement(BlockMatrix(bad, 1), 1, Keep::Leading), NotPositiveDefinite);
  }
}

TEST_CASE("Schur complements are marginal precisions on random laws") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(trial % 2);
    const std::size_t blocks = 2 + static_cast<std::size_t>(trial % (12 / d - 1));
    const auto size = static_cast<Eigen::Index>(blocks * d);
    const BlockMatrix c(random_spd(size, rng), d);
    const BlockMatrix a = invert_spd(c);
    for (std::size_t s = 1; s < blocks; ++s) {
      const Matrix lead = invert_spd(c.principal(0, s).dense());
      CHECK(relative_error(schur_complement(a, s, Keep::Leading).dense(), lead) < 1e-9);
      const Matrix tail = invert_spd(c.principal(s, blocks - 1).dense());
      CHECK(relative_error(schur_complement(a, s, Keep::Trailing).dense(), tail) < 1e-9);
    }
  }
}

}  // TEST_SUITE
