#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <variant>
#include <vector>

#include "spod/error.hpp"
#include "spod/field_data.hpp"
#include "spod/parallel.hpp"

namespace spod {

struct ConstantVelocity {
  double velocity;
  bool operator==(const ConstantVelocity&) const = default;
};

struct Tabulated {
  std::vector<double> values;  // x^sh(t_j), one per snapshot
  bool operator==(const Tabulated&) const = default;
};

/// Time-dependent spatial shift x^sh(t_j) of a co-moving frame.
class ShiftProfile {
 public:
  using Kind = std::variant<ConstantVelocity, Tabulated>;

  static ShiftProfile constant(double velocity, const TimeGrid& time) {
    if (!std::isfinite(velocity)) throw InvalidArgument("shift velocity must be finite");
    return ShiftProfile(ConstantVelocity{velocity}, time);
  }

  static ShiftProfile tabulated(std::vector<double> values, const TimeGrid& time) {
    if (static_cast<Index>(values.size()) != time.nt)
      throw InvalidArgument("tabulated shift has " + std::to_string(values.size()) +
                            " values for " + std::to_string(time.nt) + " snapshots");
    for (double v : values)
      if (!std::isfinite(v)) throw InvalidArgument("tabulated shift values must be finite");
    return ShiftProfile(Tabulated{std::move(values)}, time);
  }

  static ShiftProfile zero(const TimeGrid& time) { return constant(0.0, time); }

  const Kind& kind() const { return kind_; }
  const TimeGrid& time() const { return time_; }

  std::optional<double> velocity() const {
    if (const auto* c = std::get_if<ConstantVelocity>(&kind_)) return c->velocity;
    return std::nullopt;
  }

  /// Shift coordinate of snapshot j.
  double at(Index j) const {
    if (const auto* c = std::get_if<ConstantVelocity>(&kind_))
      return c->velocity * (static_cast<double>(j) * time_.dt);
    return std::get<Tabulated>(kind_).values[static_cast<std::size_t>(j)];
  }

  std::vector<double> values() const {
    std::vector<double> out(static_cast<std::size_t>(time_.nt));
    for (Index j = 0; j < time_.nt; ++j) out[static_cast<std::size_t>(j)] = at(j);
    return out;
  }

  bool operator==(const ShiftProfile&) const = default;

 private:
  ShiftProfile(Kind kind, const TimeGrid& time) : kind_(std::move(kind)), time_(time) {
    time_.validate();
  }

  Kind kind_;
  TimeGrid time_;
};

/// Realizes T^{-c} from T^{c}.
inline ShiftProfile negate(const ShiftProfile& p) {
  if (auto c = p.velocity()) return ShiftProfile::constant(-*c, p.time());
  auto values = std::get<Tabulated>(p.kind()).values;
  for (double& v : values) v = -v;
  return ShiftProfile::tabulated(std::move(values), p.time());
}

enum class BoundaryPolicy { PeriodicWrap, ConstantExtrapolation };

inline BoundaryPolicy default_boundary(const SpaceGrid& space) {
  return space.periodic ? BoundaryPolicy::PeriodicWrap
                        : BoundaryPolicy::ConstantExtrapolation;
}

/// Shifts within this many cells of an integer are treated as integer shifts.
inline constexpr double kIntegerShiftTolerance = 1e-9;

namespace detail {

inline bool times_match(const TimeGrid& a, const TimeGrid& b) {
  auto close = [](double x, double y) {
    return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
  };
  return a.nt == b.nt && close(a.t0, b.t0) && close(a.dt, b.dt);
}

/// Shift of one line of n samples by `cells` grid cells:
/// out[i] = in(i - cells) with linear interpolation.
inline void shift_line(const double* in, double* out, Index n, double cells,
                       BoundaryPolicy policy) {
  const double nearest = std::round(cells);
  if (std::abs(cells - nearest) <= kIntegerShiftTolerance) {
    const auto k = static_cast<Index>(nearest);
    if (policy == BoundaryPolicy::PeriodicWrap) {
      Index src = ((-k) % n + n) % n;
      for (Index i = 0; i < n; ++i) {
        out[i] = in[src];
        if (++src == n) src = 0;
      }
    } else {
      for (Index i = 0; i < n; ++i) out[i] = in[std::clamp<Index>(i - k, 0, n - 1)];
    }
    return;
  }
  if (policy == BoundaryPolicy::PeriodicWrap) {
    // i - cells = (i - base) + frac with frac in (0, 1).
    const double fl = std::floor(cells);
    const double frac = 1.0 - (cells - fl);
    const auto base = static_cast<Index>(fl) + 1;
    Index lo = ((-base) % n + n) % n;
    for (Index i = 0; i < n; ++i) {
      const Index hi = lo + 1 == n ? 0 : lo + 1;
      out[i] = in[lo] + frac * (in[hi] - in[lo]);
      lo = hi;
    }
    return;
  }
  const double last = static_cast<double>(n - 1);
  for (Index i = 0; i < n; ++i) {
    const double p = static_cast<double>(i) - cells;
    if (p <= 0.0) {
      out[i] = in[0];
    } else if (p >= last) {
      out[i] = in[n - 1];
    } else {
      const auto lo = static_cast<Index>(std::floor(p));
      const double frac = p - static_cast<double>(lo);
      out[i] = in[lo] + frac * (in[lo + 1] - in[lo]);
    }
  }
}

}  // namespace detail

/// Applies T^{x^sh}: column j of the result samples column j of `data` at
/// x - x^sh(t_j). For n_y > 1 every block of nx rows is shifted separately.
inline Matrix shift_apply(const Matrix& data, const SpaceGrid& space,
                          const ShiftProfile& profile, BoundaryPolicy policy) {
  if (policy == BoundaryPolicy::PeriodicWrap && !space.periodic)
    throw InvalidArgument("periodic wrap requested on a non-periodic grid");
  if (data.rows() != space.points())
    throw InvalidArgument("shift_apply: row count differs from the space grid");
  if (data.cols() != profile.time().nt)
    throw InvalidArgument("shift_apply: shift profile length differs from snapshot count");
  Matrix out(data.rows(), data.cols());
  const double dx = space.dx();
  parallel_for(data.cols(), [&](Index j) {
    const double cells = profile.at(j) / dx;
    for (Index b = 0; b < space.ny; ++b) {
      const Index offset = b * space.nx;
      detail::shift_line(data.col(j).data() + offset, out.col(j).data() + offset,
                         space.nx, cells, policy);
    }
  });
  return out;
}

inline SnapshotMatrix shift_apply(const SnapshotMatrix& x, const ShiftProfile& profile,
                                  BoundaryPolicy policy) {
  if (!detail::times_match(x.time(), profile.time()))
    throw InvalidArgument("shift profile time grid does not match the snapshot matrix");
  return x.with_data(shift_apply(x.data(), x.space(), profile, policy));
}

}  // namespace spod
