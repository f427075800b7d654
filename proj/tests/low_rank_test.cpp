#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace spod;

namespace {

void expect_orthonormal(const Matrix& q) {
  const Matrix g = q.transpose() * q;
  EXPECT_LT((g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff(), 1e-10);
}

}  // namespace

TEST(SvdTruncate, ExactRankOne) {
  std::mt19937 rng(21);
  Vector u = fixtures::random_matrix(rng, 6, 1).col(0).normalized();
  Vector v = fixtures::random_matrix(rng, 4, 1).col(0).normalized();
  const auto x = fixtures::wrap(3.0 * u * v.transpose());
  const auto t = svd_truncate(x, 1);
  ASSERT_EQ(t.factors.rank(), 1);
  EXPECT_NEAR(t.factors.sigma(0), 3.0, 1e-14);
  EXPECT_NEAR(t.discarded_energy, 0.0, 1e-14);
}

TEST(SvdTruncate, IdentityTwoByTwo) {
  const auto t = svd_truncate(fixtures::wrap(Matrix::Identity(2, 2)), 1);
  EXPECT_NEAR(t.discarded_energy, 1.0, 1e-15);
}

TEST(SvdTruncate, DiscardedEnergyMatchesOracle) {
  std::mt19937 rng(22);
  const Matrix m = fixtures::random_matrix(rng, 5, 5);
  const Vector s = fixtures::oracle_singular_values(m);
  const auto t = svd_truncate(fixtures::wrap(m), 3);
  const double expect = std::hypot(s(3), s(4));
  EXPECT_NEAR(t.discarded_energy, expect, 1e-12 * expect);
}

TEST(SvdTruncate, RankOutOfRange) {
  const auto x = fixtures::wrap(Matrix::Ones(4, 3));
  EXPECT_THROW(svd_truncate(x, 4), InvalidArgument);
  EXPECT_THROW(svd_truncate(x, -1), InvalidArgument);
}

TEST(SvdTruncate, ZeroMatrixGivesRankZero) {
  const auto t = svd_truncate(fixtures::wrap(Matrix::Zero(4, 3)), 2);
  EXPECT_EQ(t.factors.rank(), 0);
  EXPECT_EQ(t.discarded_energy, 0.0);
}

TEST(SvdTruncate, FactorInvariants) {
  std::mt19937 rng(23);
  const auto x = fixtures::wrap(fixtures::random_matrix(rng, 30, 12));
  const auto f = svd_truncate(x, 7).factors;
  expect_orthonormal(f.U);
  expect_orthonormal(f.V);
  for (Index l = 0; l < f.rank(); ++l) {
    EXPECT_GE(f.sigma(l), 0.0);
    if (l > 0) EXPECT_LE(f.sigma(l), f.sigma(l - 1));
    Index arg;
    f.U.col(l).cwiseAbs().maxCoeff(&arg);
    EXPECT_GE(f.U(arg, l), 0.0);
  }
}

TEST(SvdTruncate, BitwiseReproducible) {
  std::mt19937 rng(24);
  const auto x = fixtures::wrap(fixtures::random_matrix(rng, 20, 9));
  const auto a = svd_truncate(x, 4).factors, b = svd_truncate(x, 4).factors;
  EXPECT_EQ(a.U, b.U);
  EXPECT_EQ(a.sigma, b.sigma);
  EXPECT_EQ(a.V, b.V);
}

TEST(SvdTruncate, EckartYoungAgainstRandomFactorizations) {
  std::mt19937 rng(25);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = fixtures::random_matrix(rng, 4, 4);
    for (Index r = 1; r <= 3; ++r) {
      const double best = svd_truncate(fixtures::wrap(m), r).discarded_energy;
      for (int probe = 0; probe < 100; ++probe) {
        const Matrix a = fixtures::random_matrix(rng, 4, r);
        // Best coefficients for a random column space: projection.
        const Matrix q = a.householderQr().householderQ() * Matrix::Identity(4, r);
        const double err = (m - q * (q.transpose() * m)).norm();
        ASSERT_LE(best, err + 1e-12);
      }
    }
  }
}

TEST(Reconstruct, RankZeroIsZero) {
  const auto f = LowRankFactors::empty(fixtures::small_space(5), fixtures::small_time(3));
  EXPECT_EQ(reconstruct(f).data(), Matrix::Zero(5, 3));
}

TEST(Reconstruct, FullRankAndTruncationError) {
  std::mt19937 rng(26);
  const auto x = fixtures::wrap(fixtures::random_matrix(rng, 9, 6));
  EXPECT_LT(relative_mean_error(x, reconstruct(svd_truncate(x, 6).factors)), 1e-10);
  const auto t = svd_truncate(x, 2);
  const double err = (x.data() - reconstruct_matrix(t.factors)).norm();
  EXPECT_NEAR(err, t.discarded_energy, 1e-10 * t.discarded_energy);
}

TEST(Pod, PressurePulseBaselines) {
  EXPECT_GT(pod(fixtures::single_pulse().density, 2).rel_error, 0.3);
  EXPECT_GT(pod(fixtures::pressure_pulse().density, 2).rel_error, 0.5);
}

TEST(Pod, ComovingRightGoingPartIsRankOne) {
  // The right-going half of the pressure pulse, seen in its own frame.
  const auto rho = fixtures::single_pulse().density;
  const auto co = shift_apply(rho, ShiftProfile::constant(-1.0, rho.time()),
                              BoundaryPolicy::PeriodicWrap);
  EXPECT_LT(pod(co, 1).rel_error, 1e-10);
}

TEST(Pod, FullRankExact) {
  const auto rho = fixtures::pressure_pulse().density;
  EXPECT_LT(pod(rho, 200).rel_error, 1e-10);
}

TEST(SingularSpectrum, RankOne) {
  Vector u = Vector::Unit(5, 1), v = Vector::Unit(4, 2);
  const Vector s = singular_spectrum(Matrix(3.0 * u * v.transpose()), 2);
  EXPECT_NEAR(s(0), 3.0, 1e-15);
  EXPECT_NEAR(s(1), 0.0, 1e-15);
}

TEST(SingularSpectrum, FrobeniusIdentity) {
  std::mt19937 rng(27);
  const Matrix m = fixtures::random_matrix(rng, 7, 5);
  const double fro2 = m.squaredNorm();
  EXPECT_LE(singular_spectrum(m, 3).squaredNorm(), fro2);
  EXPECT_NEAR(singular_spectrum(m, 5).squaredNorm(), fro2, 1e-12 * fro2);
  EXPECT_THROW(singular_spectrum(m, 0), InvalidArgument);
  EXPECT_THROW(singular_spectrum(m, 6), InvalidArgument);
}

TEST(SingularSpectrum, ShiftRaisesLeadingValue) {
  const auto rho = fixtures::pressure_pulse().density;
  const auto shifted = shift_apply(rho, ShiftProfile::constant(-1.0, rho.time()),
                                   BoundaryPolicy::PeriodicWrap);
  EXPECT_GT(singular_spectrum(shifted, 1)(0), singular_spectrum(rho, 1)(0));
}

TEST(SingularSpectrum, AgreesWithJacobi) {
  const auto rho = fixtures::pressure_pulse().density;
  const Vector oracle = fixtures::oracle_singular_values(rho.data());
  const Vector s = singular_spectrum(rho, 20);
  EXPECT_LT((s - oracle.head(20)).cwiseAbs().maxCoeff(), 1e-12 * oracle(0));
}

TEST(RankForEnergy, Thresholds) {
  Matrix d = Matrix::Zero(4, 4);
  d.diagonal() << 4, 3, 0, 0;
  const auto x = fixtures::wrap(d);
  EXPECT_EQ(rank_for_energy(x, 0.0), 2);
  EXPECT_EQ(rank_for_energy(x, 0.6), 1);  // 3/5
  EXPECT_EQ(rank_for_energy(x, 1.0), 0);
  EXPECT_EQ(rank_for_energy(fixtures::wrap(Matrix::Zero(3, 3)), 0.1), 0);
}
