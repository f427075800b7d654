#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"

using namespace spod;
using namespace spod::analytic;

namespace {

constexpr double kPi = std::numbers::pi;

double periodic_gaussian(double x, double x0, double delta) {
  double s = 0.0;
  for (int m = -3; m <= 3; ++m) s += std::exp(-std::pow((x + m - x0) / delta, 2));
  return s;
}

// Max centred-difference residual of rho_t + rho0 u_x = 0, u_t + c^2/rho0 rho_x = 0.
double pde_residual(Index nx) {
  SpaceGrid sp{nx, 1, 1.0, true};
  TimeGrid t{nx / 2, 0.0, 0.5 / static_cast<double>(nx)};
  const WaveParams p{1.3, 0.8, 1.0};
  const auto qp = gaussian_pulse({0.4, 0.1, 1.0}, 1.0);
  const auto qm = gaussian_pulse({0.7, 0.12, 0.5}, 1.0);
  const auto f = wave_solution(qp, qm, p, sp, t);
  const Matrix& r = f.density.data();
  const Matrix& u = f.velocity.data();
  double worst = 0.0;
  const double dx = sp.dx(), dt = t.dt;
  for (Index j = 1; j + 1 < t.nt; ++j)
    for (Index i = 0; i < nx; ++i) {
      const Index ip = (i + 1) % nx, im = (i + nx - 1) % nx;
      const double r_t = (r(i, j + 1) - r(i, j - 1)) / (2 * dt);
      const double u_t = (u(i, j + 1) - u(i, j - 1)) / (2 * dt);
      const double r_x = (r(ip, j) - r(im, j)) / (2 * dx);
      const double u_x = (u(ip, j) - u(im, j)) / (2 * dx);
      worst = std::max(worst, std::abs(r_t + p.rho0 * u_x));
      worst = std::max(worst, std::abs(u_t + p.c * p.c / p.rho0 * r_x));
    }
  return worst;
}

}  // namespace

TEST(ReferenceGrid, Values) {
  const auto [sp, t] = paper_grid();
  EXPECT_EQ(sp.nx, 200);
  EXPECT_TRUE(sp.periodic);
  EXPECT_DOUBLE_EQ(sp.dx(), 0.005);
  EXPECT_EQ(t.nt, 250);
  EXPECT_EQ(1.0 * t.dt / sp.dx(), 1.0);
  EXPECT_NEAR(t.t(249), 1.245, 1e-15);
}

TEST(GaussianPulse, PeriodicImages) {
  const auto q = gaussian_pulse({0.01, 0.02, 1.0}, 1.0);
  EXPECT_NEAR(q(0.99), periodic_gaussian(0.99, 0.01, 0.02), 1e-15);
  EXPECT_NEAR(q(0.99), std::exp(-1.0), 1e-12);
  EXPECT_THROW(gaussian_pulse({0.5, 0.0, 1.0}, 1.0), InvalidArgument);
}

TEST(WaveSolution, SinglePulseTranslates) {
  const auto f = fixtures::single_pulse();
  const auto& sp = f.density.space();
  const auto& t = f.density.time();
  for (Index j : {0, 1, 37, 120, 249})
    for (Index i = 0; i < sp.nx; ++i)
      ASSERT_NEAR(f.density.data()(i, j), periodic_gaussian(sp.x(i) - t.t(j), 0.5, 0.02), 1e-12);
  EXPECT_EQ(f.velocity.data(), f.density.data());  // rho0 = c = 1, q- = 0
}

TEST(WaveSolution, PressurePulseAtRest) {
  const auto f = fixtures::pressure_pulse();
  const auto& sp = f.density.space();
  for (Index i = 0; i < sp.nx; ++i) {
    EXPECT_NEAR(f.density.data()(i, 0), 2 * periodic_gaussian(sp.x(i), 0.5, 0.02), 1e-14);
    EXPECT_EQ(f.velocity.data()(i, 0), 0.0);
  }
}

TEST(WaveSolution, MatchesStandingWave) {
  const WaveParams p{1.5, 0.7, 1.0};
  const auto [sp, t] = paper_grid();
  const Harmonic h{2, 0.8, -0.3, 0.4, 1.1};
  const double k = 2 * kPi * h.n;
  // rho = beta sin(kx)cos(wt+eta) + gamma cos(kx)cos(wt+zeta) split into +-c travelling halves.
  const Profile qp = [&](double s) {
    return 0.5 * (h.beta * std::sin(k * s - h.eta) + h.gamma * std::cos(k * s - h.zeta));
  };
  const Profile qm = [&](double s) {
    return 0.5 * (h.beta * std::sin(k * s + h.eta) + h.gamma * std::cos(k * s + h.zeta));
  };
  const auto a = wave_solution(qp, qm, p, sp, t);
  const auto b = standing_wave({{h}}, p, sp, t);
  EXPECT_LT((a.density.data() - b.density.data()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((a.velocity.data() - b.velocity.data()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(WaveSolution, RejectsNonPeriodic) {
  SpaceGrid sp{10, 1, 1.0, false};
  EXPECT_THROW(wave_solution(zero_profile(), zero_profile(), {}, sp, {3, 0.0, 0.1}),
               InvalidArgument);
  EXPECT_THROW(wave_solution(zero_profile(), zero_profile(), {0.0, 1.0, 1.0},
                             SpaceGrid{10, 1, 1.0, true}, {3, 0.0, 0.1}),
               InvalidArgument);
}

TEST(WaveSolution, PdeResidualSecondOrder) {
  const double coarse = pde_residual(100), fine = pde_residual(200);
  EXPECT_GE(coarse / fine, 3.5);
}

TEST(StandingWave, ZeroAmplitudes) {
  const auto [sp, t] = paper_grid();
  const auto f = standing_wave({{Harmonic{1}, Harmonic{3}}}, {}, sp, t);
  EXPECT_EQ(f.density.data(), Matrix::Zero(200, 250));
  EXPECT_EQ(f.velocity.data(), Matrix::Zero(200, 250));
}

TEST(StandingWave, SingleBeta) {
  const auto f = fixtures::string_mode();
  const auto& sp = f.density.space();
  const auto& t = f.density.time();
  for (Index j : {0, 10, 249})
    for (Index i = 0; i < sp.nx; ++i)
      ASSERT_NEAR(f.density.data()(i, j), std::sin(2 * kPi * sp.x(i)) * std::cos(2 * kPi * t.t(j)),
                  1e-13);
}

TEST(CrossingFronts, DefaultGridAndTrajectories) {
  const auto [sp, t] = crossing_fronts_grid();
  EXPECT_FALSE(sp.periodic);
  EXPECT_NEAR(0.4 * t.dt, sp.dx(), 1e-16);
  const CrossingFrontsSpec spec;
  const auto x = crossing_fronts(sp, t, spec);
  EXPECT_EQ(x.field_name(), "fronts");
  const auto [a, b] = crossing_fronts_trajectories(spec, t);
  EXPECT_LT(a.back(), 1.0);
  EXPECT_GT(b.back(), 0.0);
  EXPECT_GT(a.back(), b.back());  // they have passed through each other
  // Left state 1 and right state 0 at every time.
  for (Index j = 0; j < t.nt; ++j) {
    EXPECT_NEAR(x.data()(0, j), 1.0, 1e-6);
    EXPECT_NEAR(x.data()(sp.nx - 1, j), 0.0, 1e-6);
  }
}

TEST(CrossingFronts, ExactTwoFrameDecomposition) {
  const auto [sp, t] = crossing_fronts_grid();
  const CrossingFrontsSpec spec;
  const auto x = crossing_fronts(sp, t, spec);
  const auto [p1, p2] = crossing_fronts_profiles(spec, t);
  FrameSpec fs{{ShiftProfile::tabulated(p1.values(), t), ShiftProfile::tabulated(p2.values(), t)},
               {1, 1},
               {1, 1},
               BoundaryPolicy::ConstantExtrapolation};
  const auto swap = *spec.effective_swap_time(t.t0);
  Vector u1(sp.nx), u2(sp.nx), v1(t.nt), v2(t.nt);
  for (Index i = 0; i < sp.nx; ++i) {
    u1(i) = falling_step((sp.x(i) - spec.x1) / spec.width);
    u2(i) = falling_step((sp.x(i) - spec.x2) / spec.width);
  }
  for (Index j = 0; j < t.nt; ++j) {
    v1(j) = t.t(j) >= swap ? spec.jump2 : spec.jump1;
    v2(j) = t.t(j) >= swap ? spec.jump1 : spec.jump2;
  }
  const auto factors = [&](const Vector& u, const Vector& v) {
    return LowRankFactors{Matrix(u.normalized()), Vector::Constant(1, u.norm() * v.norm()),
                          Matrix(v.normalized()), sp, t};
  };
  FrameDecomposition exact{{{fs.profiles[0], factors(u1, v1)}, {fs.profiles[1], factors(u2, v2)}},
                           sp,
                           t,
                           BoundaryPolicy::ConstantExtrapolation};
  EXPECT_LT(relative_mean_error(x, naive_reconstruct(exact)), 1e-12);

  // The constructed frames are a fixed point of the iteration.
  const auto warm = spod::spod(x, fs, {100, 1e-10, 1e-12}, &exact);
  EXPECT_LT(warm.report.iterations.back().rel_mean_error, 1e-10);

  // From the zero start the iteration settles on a different fixed point.
  const auto cold = spod::spod(x, fs, {100, 1e-10, 1e-12});
  EXPECT_EQ(cold.report.stop_reason, StopReason::Stalled);
  EXPECT_NEAR(cold.report.iterations.back().rel_mean_error, 0.011985, 1e-5);
}

TEST(CrossingFronts, EqualSpeedsSingleFront) {
  const auto [sp, t] = crossing_fronts_grid();
  CrossingFrontsSpec spec;
  spec.v2 = spec.v1;
  const auto x = crossing_fronts(sp, t, spec);
  FrameSpec fs{{ShiftProfile::tabulated(ShiftProfile::constant(spec.v1, t).values(), t)},
               {1},
               {1},
               BoundaryPolicy::ConstantExtrapolation};
  const auto r = spod::spod(x, fs, {20, 1e-10, 1e-12});
  EXPECT_LT(r.report.iterations.back().rel_mean_error, 1e-8);
}

TEST(CrossingFronts, Preconditions) {
  const auto [sp, t] = crossing_fronts_grid();
  CrossingFrontsSpec spec;
  spec.v1 = 1.0;
  EXPECT_THROW(crossing_fronts(sp, t, spec), InvalidArgument);
  CrossingFrontsSpec slow;
  slow.v1 = -0.5;
  EXPECT_THROW(crossing_fronts(sp, t, slow), InvalidArgument);
}

TEST(MovingBlob, StaticAndAligned) {
  SpaceGrid sp{32, 8, 1.0, true};
  TimeGrid t{20, 0.0, sp.dx()};
  const auto still = moving_blob_2d(sp, t, 0.0);
  for (Index j = 1; j < t.nt; ++j) ASSERT_EQ(still.data().col(j), still.data().col(0));
  EXPECT_LT(pod(still, 1).rel_error, 1e-12);

  const auto moving = moving_blob_2d(sp, t, 3.0);
  const auto co = shift_apply(moving, ShiftProfile::constant(-3.0, t), BoundaryPolicy::PeriodicWrap);
  for (Index j = 1; j < t.nt; ++j) ASSERT_EQ(co.data().col(j), co.data().col(0));
  EXPECT_EQ(co.data().col(0), still.data().col(0));
  EXPECT_THROW(moving_blob_2d(SpaceGrid{32, 1, 1.0, true}, t, 1.0), InvalidArgument);
}

TEST(Generators, Deterministic) {
  const auto a = fixtures::pressure_pulse(), b = fixtures::pressure_pulse();
  EXPECT_EQ(a.density.data(), b.density.data());
  const auto [sp, t] = crossing_fronts_grid();
  EXPECT_EQ(crossing_fronts(sp, t).data(), crossing_fronts(sp, t).data());
}
