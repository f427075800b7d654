#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "spod/error.hpp"
#include "spod/field_data.hpp"
#include "spod/shift.hpp"

namespace spod::analytic {

struct WaveParams {
  double rho0 = 1.0;
  double c = 1.0;
  double length = 1.0;

  void validate() const {
    if (!(rho0 > 0.0) || !(c > 0.0) || !(length > 0.0))
      throw InvalidArgument("wave parameters must be positive");
  }
};

struct PulseSpec {
  double x0 = 0.5;
  double delta = 0.02;
  double amplitude = 1.0;
};

/// Initial profile q(x), evaluated for x in [0, L).
using Profile = std::function<double(double)>;

/// Gaussian pulse made L-periodic by summing its three nearest images.
inline Profile gaussian_pulse(const PulseSpec& p, double length) {
  if (!(p.delta > 0.0)) throw InvalidArgument("pulse width must be positive");
  return [p, length](double x) {
    double sum = 0.0;
    for (int m = -1; m <= 1; ++m) {
      const double z = (x + m * length - p.x0) / p.delta;
      sum += std::exp(-z * z);
    }
    return p.amplitude * sum;
  };
}

inline Profile zero_profile() {
  return [](double) { return 0.0; };
}

struct Harmonic {
  int n = 1;
  double beta = 0.0;
  double gamma = 0.0;
  double eta = 0.0;
  double zeta = 0.0;
};

struct StandingWaveSpec {
  std::vector<Harmonic> harmonics;
};

struct FieldPair {
  SnapshotMatrix density;
  SnapshotMatrix velocity;
};

/// 200 periodic points on [0, 1) and 250 snapshots with dt = 0.005, so that
/// c dt = dx for c = 1 and every unit-velocity shift is a whole number of cells.
inline std::pair<SpaceGrid, TimeGrid> paper_grid() {
  return {SpaceGrid{200, 1, 1.0, true}, TimeGrid{250, 0.0, 0.005}};
}

namespace detail {

inline double wrap(double x, double length) {
  double r = std::fmod(x, length);
  if (r < 0.0) r += length;
  return r >= length ? 0.0 : r;
}

/// Coordinate x_i - s wrapped to [0, L). When s is a whole number of cells
/// the grid point is addressed by index, so equal points give equal bits.
inline double periodic_argument(const SpaceGrid& space, Index i, double s) {
  const double cells = s / space.dx();
  const double nearest = std::round(cells);
  if (std::abs(cells - nearest) <= kIntegerShiftTolerance) {
    const Index n = space.nx;
    const Index k = ((i - static_cast<Index>(nearest)) % n + n) % n;
    return space.x(k);
  }
  return wrap(space.x(i) - s, space.length);
}

/// x_i - s without wrapping, index-exact for whole-cell shifts.
inline double open_argument(const SpaceGrid& space, Index i, double s) {
  const double cells = s / space.dx();
  const double nearest = std::round(cells);
  if (std::abs(cells - nearest) <= kIntegerShiftTolerance)
    return static_cast<double>(i - static_cast<Index>(nearest)) * space.dx();
  return space.x(i) - s;
}

}  // namespace detail

/// Closed-form solution of the 1-D linear wave equation:
/// rho = rho0 (q+(x - ct) + q-(x + ct)),  u = c (q+(x - ct) - q-(x + ct)).
inline FieldPair wave_solution(const Profile& qp, const Profile& qm, const WaveParams& params,
                               const SpaceGrid& space, const TimeGrid& time) {
  params.validate();
  space.validate();
  time.validate();
  if (!space.periodic || space.ny != 1)
    throw InvalidArgument("wave_solution needs a periodic one-dimensional grid");
  if (std::abs(space.length - params.length) > 1e-12 * params.length)
    throw InvalidArgument("wave_solution: grid length differs from the wave parameters");
  Matrix rho(space.nx, time.nt), u(space.nx, time.nt);
  for (Index j = 0; j < time.nt; ++j) {
    const double travel = params.c * time.t(j);
    for (Index i = 0; i < space.nx; ++i) {
      const double right = qp(detail::periodic_argument(space, i, travel));
      const double left = qm(detail::periodic_argument(space, i, -travel));
      rho(i, j) = params.rho0 * (right + left);
      u(i, j) = params.c * (right - left);
    }
  }
  return {SnapshotMatrix(std::move(rho), space, time, "density"),
          SnapshotMatrix(std::move(u), space, time, "velocity")};
}

/// Superposition of string modes. For harmonic n with k = 2 pi n / L and
/// w = 2 pi n c / L:
///   rho = rho0 (beta sin(kx) cos(wt + eta) + gamma cos(kx) cos(wt + zeta))
///   u   = c (-beta cos(kx) sin(wt + eta) + gamma sin(kx) sin(wt + zeta))
/// which solves the same wave equation as wave_solution.
inline FieldPair standing_wave(const StandingWaveSpec& spec, const WaveParams& params,
                               const SpaceGrid& space, const TimeGrid& time) {
  params.validate();
  space.validate();
  time.validate();
  if (space.ny != 1) throw InvalidArgument("standing_wave needs a one-dimensional grid");
  Matrix rho = Matrix::Zero(space.nx, time.nt), u = Matrix::Zero(space.nx, time.nt);
  for (const auto& h : spec.harmonics) {
    const double k = 2.0 * std::numbers::pi * h.n / params.length;
    for (Index j = 0; j < time.nt; ++j) {
      const double wt = k * params.c * time.t(j);
      const double cb = std::cos(wt + h.eta), sb = std::sin(wt + h.eta);
      const double cg = std::cos(wt + h.zeta), sg = std::sin(wt + h.zeta);
      for (Index i = 0; i < space.nx; ++i) {
        const double sx = std::sin(k * space.x(i)), cx = std::cos(k * space.x(i));
        rho(i, j) += params.rho0 * (h.beta * sx * cb + h.gamma * cx * cg);
        u(i, j) += params.c * (-h.beta * cx * sb + h.gamma * sx * sg);
      }
    }
  }
  return {SnapshotMatrix(std::move(rho), space, time, "density"),
          SnapshotMatrix(std::move(u), space, time, "velocity")};
}

/// Two smooth falling steps (tanh profile) travelling on straight lines and
/// passing through each other. At `swap_time` the two step heights are
/// exchanged, mimicking the change of strength at an interaction. Each front
/// is one shifted rank-one term, so the field has an exact two-frame,
/// rank-one-per-frame decomposition.
struct CrossingFrontsSpec {
  double v1 = 0.4;
  double v2 = -0.4;
  double x1 = 1.0 / 3.0;
  double x2 = 2.0 / 3.0;
  double width = 0.02;
  double jump1 = 0.6;
  double jump2 = 0.4;
  std::optional<double> swap_time;  // defaults to the meeting time when v1 > v2

  std::optional<double> effective_swap_time(double t0) const {
    if (swap_time) return swap_time;
    if (v1 > v2) return t0 + (x2 - x1) / (v1 - v2);
    return std::nullopt;
  }
};

/// Non-periodic unit domain with 200 points and dt = dx / 0.4: the default
/// front speeds move exactly one cell per snapshot and the fronts stay inside.
inline std::pair<SpaceGrid, TimeGrid> crossing_fronts_grid() {
  SpaceGrid space{200, 1, 1.0, false};
  return {space, TimeGrid{67, 0.0, space.dx() / 0.4}};
}

inline double falling_step(double z) { return 0.5 * (1.0 - std::tanh(z)); }

/// Displacement of each front from its start: the exact shift profiles.
inline std::pair<ShiftProfile, ShiftProfile> crossing_fronts_profiles(const CrossingFrontsSpec& s,
                                                                      const TimeGrid& time) {
  return {ShiftProfile::constant(s.v1, time), ShiftProfile::constant(s.v2, time)};
}

/// Front centres x_k + v_k (t_j - t0).
inline std::pair<std::vector<double>, std::vector<double>> crossing_fronts_trajectories(
    const CrossingFrontsSpec& s, const TimeGrid& time) {
  std::vector<double> a(static_cast<std::size_t>(time.nt)), b(a.size());
  for (Index j = 0; j < time.nt; ++j) {
    const double elapsed = static_cast<double>(j) * time.dt;
    a[static_cast<std::size_t>(j)] = s.x1 + s.v1 * elapsed;
    b[static_cast<std::size_t>(j)] = s.x2 + s.v2 * elapsed;
  }
  return {a, b};
}

inline SnapshotMatrix crossing_fronts(const SpaceGrid& space, const TimeGrid& time,
                                      const CrossingFrontsSpec& s = {}) {
  space.validate();
  time.validate();
  if (space.ny != 1) throw InvalidArgument("crossing_fronts needs a one-dimensional grid");
  if (!(s.width > 0.0)) throw InvalidArgument("crossing_fronts: width must be positive");
  if (s.v1 < s.v2) throw InvalidArgument("crossing_fronts: needs v1 >= v2");
  const auto [ta, tb] = crossing_fronts_trajectories(s, time);
  for (std::size_t j = 0; j < ta.size(); ++j)
    if (ta[j] < 0.0 || ta[j] > space.length || tb[j] < 0.0 || tb[j] > space.length)
      throw InvalidArgument("crossing_fronts: fronts leave the domain at snapshot " +
                            std::to_string(j));
  const auto swap = s.effective_swap_time(time.t0);
  Matrix out(space.nx, time.nt);
  for (Index j = 0; j < time.nt; ++j) {
    const double elapsed = static_cast<double>(j) * time.dt;
    const bool swapped = swap && time.t(j) >= *swap;
    const double h1 = swapped ? s.jump2 : s.jump1;
    const double h2 = swapped ? s.jump1 : s.jump2;
    for (Index i = 0; i < space.nx; ++i) {
      const double z1 = (detail::open_argument(space, i, s.v1 * elapsed) - s.x1) / s.width;
      const double z2 = (detail::open_argument(space, i, s.v2 * elapsed) - s.x2) / s.width;
      out(i, j) = h1 * falling_step(z1) + h2 * falling_step(z2);
    }
  }
  return {std::move(out), space, time, "fronts"};
}

struct BlobSpec {
  double x0 = 0.5;
  double y0 = 0.5;
  double radius = 0.1;
};

/// Gaussian blob on the periodic unit square, moving along the shifted axis
/// with velocity v. Rows follow row_index (shifted axis fastest); the second
/// axis has ny points on [0, 1).
inline SnapshotMatrix moving_blob_2d(const SpaceGrid& space, const TimeGrid& time, double v,
                                     const BlobSpec& blob = {}) {
  space.validate();
  time.validate();
  if (!space.periodic || space.ny < 2)
    throw InvalidArgument("moving_blob_2d needs a periodic grid with ny > 1");
  if (!(blob.radius > 0.0)) throw InvalidArgument("moving_blob_2d: radius must be positive");
  const auto images = [](double d, double period) {
    double sum = 0.0;
    for (int m = -1; m <= 1; ++m) sum += std::exp(-(d + m * period) * (d + m * period));
    return sum;
  };
  Matrix out(space.points(), time.nt);
  for (Index j = 0; j < time.nt; ++j) {
    const double travel = v * (static_cast<double>(j) * time.dt);
    for (Index iy = 0; iy < space.ny; ++iy) {
      const double y = static_cast<double>(iy) / static_cast<double>(space.ny);
      const double gy = images((y - blob.y0) / blob.radius, 1.0 / blob.radius);
      for (Index ix = 0; ix < space.nx; ++ix) {
        const double x = detail::periodic_argument(space, ix, travel);
        const double gx = images((x - blob.x0) / blob.radius, space.length / blob.radius);
        out(row_index(ix, iy, space.nx), j) = gx * gy;
      }
    }
  }
  return {std::move(out), space, time, "blob"};
}

}  // namespace spod::analytic
