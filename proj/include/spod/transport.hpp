#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "spod/error.hpp"
#include "spod/field_data.hpp"
#include "spod/low_rank.hpp"
#include "spod/parallel.hpp"
#include "spod/shift.hpp"

namespace spod {

struct ScanMaximum {
  Index sample;
  double velocity;
  double leading_sigma;
};

struct VelocityScanResult {
  std::vector<double> velocities;  // strictly increasing
  Matrix spectra;                  // one row per velocity, k leading singular values
  std::vector<ScanMaximum> maxima;
};

/// Interior local maxima of `values`: a run of equal samples counts once, at
/// its first index, when it is strictly above the samples on either side.
inline std::vector<Index> local_maxima(const Vector& values) {
  std::vector<Index> out;
  const Index n = values.size();
  Index i = 1;
  while (i < n - 1) {
    Index end = i;
    while (end + 1 < n && values(end + 1) == values(i)) ++end;
    if (end < n - 1 && values(i) > values(i - 1) && values(i) > values(end + 1))
      out.push_back(i);
    i = end + 1;
  }
  return out;
}

/// Leading singular values of T^{-c}(X) over uniformly sampled c.
inline VelocityScanResult velocity_scan(const SnapshotMatrix& x, double c_min, double c_max,
                                        Index n_samples, Index k,
                                        std::optional<BoundaryPolicy> boundary = std::nullopt) {
  if (!(c_min < c_max) || !std::isfinite(c_min) || !std::isfinite(c_max))
    throw InvalidArgument("velocity scan needs c_min < c_max");
  if (n_samples < 3) throw InvalidArgument("velocity scan needs at least 3 samples");
  if (k < 1 || k > std::min(x.rows(), x.cols()))
    throw InvalidArgument("velocity scan: k out of range");
  const BoundaryPolicy policy = boundary.value_or(default_boundary(x.space()));

  VelocityScanResult scan;
  scan.velocities.resize(static_cast<std::size_t>(n_samples));
  for (Index i = 0; i < n_samples; ++i)
    scan.velocities[static_cast<std::size_t>(i)] =
        c_min + (c_max - c_min) * static_cast<double>(i) / static_cast<double>(n_samples - 1);
  scan.spectra.resize(n_samples, k);
  parallel_for(
      n_samples,
      [&](Index i) {
        const auto profile = ShiftProfile::constant(-scan.velocities[static_cast<std::size_t>(i)],
                                                    x.time());
        scan.spectra.row(i) =
            singular_spectrum(shift_apply(x.data(), x.space(), profile, policy), k).transpose();
      },
      1);
  const Vector leading = scan.spectra.col(0);
  for (Index i : local_maxima(leading))
    scan.maxima.push_back({i, scan.velocities[static_cast<std::size_t>(i)], leading(i)});
  return scan;
}

/// Vertex of the parabola through sample `which` and its two neighbours,
/// clamped to the neighbour interval.
inline double refine_maximum(const VelocityScanResult& scan, Index which) {
  const auto n = static_cast<Index>(scan.velocities.size());
  if (which <= 0 || which >= n - 1)
    throw InvalidArgument("refine_maximum: sample " + std::to_string(which) +
                          " is not an interior sample");
  const auto at = [&](Index i) { return scan.velocities[static_cast<std::size_t>(i)]; };
  const double x0 = at(which - 1), x1 = at(which), x2 = at(which + 1);
  const double y0 = scan.spectra(which - 1, 0), y1 = scan.spectra(which, 0),
               y2 = scan.spectra(which + 1, 0);
  if (y1 < y0 || y1 < y2)
    throw InvalidArgument("refine_maximum: sample " + std::to_string(which) +
                          " is not a local maximum");
  // Newton form: y = y0 + d01 (x - x0) + a (x - x0)(x - x1).
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double a = (d12 - d01) / (x2 - x0);
  if (a >= 0.0) return x1;  // flat or convex: no interior vertex
  const double vertex = 0.5 * (x0 + x1) - d01 / (2.0 * a);
  return std::clamp(vertex, x0, x2);
}

enum class ScanSide { FromLeft, FromRight };
enum class CrossingSense { Rising, Falling };

/// Front coordinates x_f(t_j) found by a threshold search.
struct FrontTrack {
  std::vector<double> positions;
  double threshold = 0.0;
  ScanSide side = ScanSide::FromLeft;
  CrossingSense sense = CrossingSense::Falling;
};

/// For every snapshot, the first crossing of `threshold` met when scanning
/// from `side`. The sense refers to increasing x: Falling means the field
/// drops through the threshold as x grows. The crossing is located by linear
/// interpolation between the straddling samples. On periodic grids the seam
/// pair (n-1, 0) is also searched and the track is unwrapped by +-L so that it
/// stays continuous.
inline FrontTrack threshold_track(const SnapshotMatrix& x, double threshold, ScanSide side,
                                  CrossingSense sense) {
  const auto& space = x.space();
  if (space.ny != 1) throw InvalidArgument("threshold_track needs one-dimensional data");
  const Index n = space.nx;
  const double dx = space.dx();
  const Index pairs = space.periodic ? n : n - 1;

  FrontTrack track{std::vector<double>(static_cast<std::size_t>(x.cols())), threshold, side,
                   sense};
  for (Index j = 0; j < x.cols(); ++j) {
    const auto col = x.data().col(j);
    std::optional<double> found;
    for (Index step = 0; step < pairs && !found; ++step) {
      const Index i = side == ScanSide::FromLeft ? step : pairs - 1 - step;
      const double a = col(i), b = col((i + 1) % n);
      const bool hit = sense == CrossingSense::Rising ? (a < threshold && b >= threshold)
                                                      : (a > threshold && b <= threshold);
      if (hit) found = space.x(i) + dx * (threshold - a) / (b - a);
    }
    if (!found) throw NoCrossing(j);
    track.positions[static_cast<std::size_t>(j)] = *found;
  }
  if (space.periodic) {
    for (std::size_t j = 1; j < track.positions.size(); ++j) {
      const double jump = track.positions[j] - track.positions[j - 1];
      track.positions[j] -= space.length * std::round(jump / space.length);
    }
  }
  return track;
}

/// Swaps the tails of two tracks after their closest approach and bridges
/// the window [j* - w, j* + w] (clipped to the track) linearly, so that the
/// corrected tracks cross. Identical tracks are returned unchanged.
inline std::pair<FrontTrack, FrontTrack> crossing_correction(const FrontTrack& a,
                                                             const FrontTrack& b,
                                                             Index blend_halfwidth) {
  const auto n = static_cast<Index>(a.positions.size());
  if (static_cast<Index>(b.positions.size()) != n)
    throw InvalidArgument("crossing_correction: tracks differ in length");
  if (blend_halfwidth < 1) throw InvalidArgument("crossing_correction: blend half-width < 1");
  if (n < 2 || blend_halfwidth >= n)
    throw InvalidArgument("crossing_correction: blend window does not fit the track");
  if (a.positions == b.positions) return {a, b};

  Index closest = 0;
  for (Index j = 1; j < n; ++j) {
    const auto d = [&](Index i) {
      return std::abs(a.positions[static_cast<std::size_t>(i)] -
                      b.positions[static_cast<std::size_t>(i)]);
    };
    if (d(j) < d(closest)) closest = j;
  }
  const Index lo = std::max<Index>(0, closest - blend_halfwidth);
  const Index hi = std::min<Index>(n - 1, closest + blend_halfwidth);

  FrontTrack out_a = a, out_b = b;
  const auto& pa = a.positions;
  const auto& pb = b.positions;
  const auto idx = [](Index i) { return static_cast<std::size_t>(i); };
  for (Index j = lo; j <= hi; ++j) {
    const double w = static_cast<double>(j - lo) / static_cast<double>(hi - lo);
    out_a.positions[idx(j)] = pa[idx(lo)] + w * (pb[idx(hi)] - pa[idx(lo)]);
    out_b.positions[idx(j)] = pb[idx(lo)] + w * (pa[idx(hi)] - pb[idx(lo)]);
  }
  for (Index j = hi + 1; j < n; ++j) {
    out_a.positions[idx(j)] = pb[idx(j)];
    out_b.positions[idx(j)] = pa[idx(j)];
  }
  return {std::move(out_a), std::move(out_b)};
}

/// Tabulated shift profile that moves the frame with the front, measured
/// from the front's position at the first snapshot.
inline ShiftProfile to_shift_profile(const FrontTrack& track, const TimeGrid& time) {
  if (track.positions.empty()) throw InvalidArgument("empty front track");
  std::vector<double> values(track.positions.size());
  for (std::size_t j = 0; j < values.size(); ++j)
    values[j] = track.positions[j] - track.positions.front();
  return ShiftProfile::tabulated(std::move(values), time);
}

}  // namespace spod
