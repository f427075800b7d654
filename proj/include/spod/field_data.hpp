#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spod/error.hpp"

namespace spod {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Uniform grid along the shifted axis, optionally repeated n_y times along a
/// second, never-shifted axis.
struct SpaceGrid {
  Index nx = 2;
  Index ny = 1;
  double length = 1.0;
  bool periodic = true;

  /// Periodic grids exclude the right end point; non-periodic grids include it.
  double dx() const {
    return periodic ? length / static_cast<double>(nx)
                    : length / static_cast<double>(nx - 1);
  }
  double x(Index i) const { return static_cast<double>(i) * dx(); }
  Index points() const { return nx * ny; }

  void validate() const {
    if (nx < 2) throw InvalidArgument("space grid needs nx >= 2");
    if (ny < 1) throw InvalidArgument("space grid needs ny >= 1");
    if (!(length > 0.0) || !std::isfinite(length))
      throw InvalidArgument("space grid needs a positive finite length");
  }

  bool operator==(const SpaceGrid&) const = default;
};

struct TimeGrid {
  Index nt = 1;
  double t0 = 0.0;
  double dt = 1.0;

  double t(Index j) const { return t0 + static_cast<double>(j) * dt; }

  void validate() const {
    if (nt < 1) throw InvalidArgument("time grid needs nt >= 1");
    if (!(dt > 0.0) || !std::isfinite(dt) || !std::isfinite(t0))
      throw InvalidArgument("time grid needs finite t0 and positive dt");
  }

  bool operator==(const TimeGrid&) const = default;
};

/// Row index of point (ix, iy): the shifted axis runs fastest, so every
/// contiguous block of nx rows is one line along it.
constexpr Index row_index(Index ix, Index iy, Index nx) { return iy * nx + ix; }

/// Space-by-time field samples with their grids. Immutable once built.
class SnapshotMatrix {
 public:
  SnapshotMatrix(Matrix data, SpaceGrid space, TimeGrid time,
                 std::string field_name = "field")
      : data_(std::move(data)),
        space_(space),
        time_(time),
        field_name_(std::move(field_name)) {
    space_.validate();
    time_.validate();
    if (data_.rows() != space_.points())
      throw InvalidArgument("snapshot rows (" + std::to_string(data_.rows()) +
                            ") differ from nx*ny (" +
                            std::to_string(space_.points()) + ")");
    if (data_.cols() != time_.nt)
      throw InvalidArgument("snapshot columns (" + std::to_string(data_.cols()) +
                            ") differ from nt (" + std::to_string(time_.nt) + ")");
    if (!data_.allFinite())
      throw InvalidArgument("snapshot matrix contains non-finite entries");
  }

  static SnapshotMatrix zeros(const SpaceGrid& space, const TimeGrid& time,
                              std::string field_name = "field") {
    return {Matrix::Zero(space.points(), time.nt), space, time, std::move(field_name)};
  }

  const Matrix& data() const { return data_; }
  const SpaceGrid& space() const { return space_; }
  const TimeGrid& time() const { return time_; }
  const std::string& field_name() const { return field_name_; }
  Index rows() const { return data_.rows(); }
  Index cols() const { return data_.cols(); }

  /// Same grids and label, new values.
  SnapshotMatrix with_data(Matrix data) const {
    return {std::move(data), space_, time_, field_name_};
  }

  bool same_grid(const SnapshotMatrix& other) const {
    return space_ == other.space_ && time_ == other.time_;
  }

 private:
  Matrix data_;
  SpaceGrid space_;
  TimeGrid time_;
  std::string field_name_;
};

inline double frobenius_norm(const Matrix& x) { return x.norm(); }
inline double frobenius_norm(const SnapshotMatrix& x) { return x.data().norm(); }

/// ||X - X_approx||_F / ||X||_F.
inline double relative_mean_error(const SnapshotMatrix& x, const SnapshotMatrix& approx) {
  if (!x.same_grid(approx))
    throw InvalidArgument("relative_mean_error: matrices live on different grids");
  const double denom = frobenius_norm(x);
  if (denom == 0.0)
    throw NumericalError("relative_mean_error: reference matrix has zero norm");
  return (x.data() - approx.data()).norm() / denom;
}

struct Normalized {
  SnapshotMatrix matrix;
  double scale;  // original = scale * normalized
};

/// Divides by the largest absolute entry so the normalized field peaks at 1.
inline Normalized normalize_max_abs(const SnapshotMatrix& x) {
  const double peak = x.data().cwiseAbs().maxCoeff();
  if (peak == 0.0) return {x, 1.0};
  return {x.with_data(x.data() / peak), peak};
}

struct StackBlock {
  std::string field_name;
  Index row_begin;
  Index rows;
};

struct Stacked {
  SnapshotMatrix matrix;
  std::vector<StackBlock> blocks;
};

/// Stacks several fields on the same grid vertically. The result is
/// described as a grid with ny multiplied by the field count, so each block
/// of nx rows is still one line along the shifted axis.
inline Stacked stack_fields(std::span<const SnapshotMatrix> fields) {
  if (fields.empty()) throw InvalidArgument("stack_fields: no fields given");
  const auto& first = fields.front();
  Index total = 0;
  for (const auto& f : fields) {
    if (!f.same_grid(first)) throw InvalidArgument("stack_fields: grids differ");
    total += f.rows();
  }
  Matrix data(total, first.cols());
  std::vector<StackBlock> blocks;
  std::string name;
  Index row = 0;
  for (const auto& f : fields) {
    data.middleRows(row, f.rows()) = f.data();
    blocks.push_back({f.field_name(), row, f.rows()});
    name += (name.empty() ? "" : "+") + f.field_name();
    row += f.rows();
  }
  SpaceGrid space = first.space();
  space.ny *= static_cast<Index>(fields.size());
  return {SnapshotMatrix(std::move(data), space, first.time(), name), std::move(blocks)};
}

/// Flattens an (nx, ny) array of one snapshot into a column using row_index.
inline Vector flatten_snapshot(const Matrix& field2d) {
  const Index nx = field2d.rows();
  Vector out(field2d.size());
  for (Index iy = 0; iy < field2d.cols(); ++iy)
    for (Index ix = 0; ix < nx; ++ix) out(row_index(ix, iy, nx)) = field2d(ix, iy);
  return out;
}

inline Matrix unflatten_snapshot(const Vector& column, Index nx, Index ny) {
  if (column.size() != nx * ny)
    throw InvalidArgument("unflatten_snapshot: size differs from nx*ny");
  Matrix out(nx, ny);
  for (Index iy = 0; iy < ny; ++iy)
    for (Index ix = 0; ix < nx; ++ix) out(ix, iy) = column(row_index(ix, iy, nx));
  return out;
}

}  // namespace spod
