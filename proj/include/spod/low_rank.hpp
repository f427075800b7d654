#pragma once

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

#include "spod/error.hpp"
#include "spod/field_data.hpp"

namespace spod {

/// Truncated SVD triple U diag(sigma) V^T of one frame.
struct LowRankFactors {
  Matrix U;      // points x r, orthonormal columns (spatial modes)
  Vector sigma;  // r, nonincreasing, >= 0
  Matrix V;      // nt x r, orthonormal columns (time amplitudes)
  SpaceGrid space;
  TimeGrid time;

  Index rank() const { return sigma.size(); }

  static LowRankFactors empty(const SpaceGrid& space, const TimeGrid& time) {
    return {Matrix(space.points(), 0), Vector(0), Matrix(time.nt, 0), space, time};
  }
};

struct Truncation {
  LowRankFactors factors;
  double discarded_energy;  // sqrt(sum of squared dropped singular values)
};

namespace detail {

/// Flips each mode so that the largest-magnitude entry of its U column is
/// nonnegative (lowest row wins ties); V is flipped alongside.
inline void fix_signs(Matrix& u, Matrix& v) {
  for (Index l = 0; l < u.cols(); ++l) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < u.rows(); ++i) {
      const double a = std::abs(u(i, l));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (u(best, l) < 0.0) {
      u.col(l) = -u.col(l);
      v.col(l) = -v.col(l);
    }
  }
}

inline Truncation truncate_matrix(const Matrix& x, Index r, const SpaceGrid& space,
                                  const TimeGrid& time) {
  const Index full = std::min(x.rows(), x.cols());
  if (r < 0 || r > full)
    throw InvalidArgument("rank " + std::to_string(r) + " outside [0, " +
                          std::to_string(full) + "]");
  if (!x.allFinite()) throw NumericalError("SVD input contains non-finite entries");
  if (r == 0 || x.isZero(0.0)) {
    return {LowRankFactors::empty(space, time),
            r == 0 ? x.norm() : 0.0};
  }
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  Matrix u = svd.matrixU().leftCols(r);
  Matrix v = svd.matrixV().leftCols(r);
  fix_signs(u, v);
  const double discarded = s.tail(full - r).norm();
  return {LowRankFactors{std::move(u), s.head(r), std::move(v), space, time}, discarded};
}

}  // namespace detail

/// Best rank-r approximation. A zero matrix yields rank-0 factors.
inline Truncation svd_truncate(const SnapshotMatrix& x, Index r) {
  return detail::truncate_matrix(x.data(), r, x.space(), x.time());
}

inline Matrix reconstruct_matrix(const LowRankFactors& f) {
  if (f.rank() == 0) return Matrix::Zero(f.U.rows(), f.V.rows());
  return f.U * f.sigma.asDiagonal() * f.V.transpose();
}

inline SnapshotMatrix reconstruct(const LowRankFactors& f, std::string field_name = "field") {
  return {reconstruct_matrix(f), f.space, f.time, std::move(field_name)};
}

struct PodResult {
  LowRankFactors factors;
  double rel_error;
};

/// Classical POD: truncated SVD of the lab-frame snapshot matrix.
inline PodResult pod(const SnapshotMatrix& x, Index r) {
  auto t = svd_truncate(x, r);
  const double err = relative_mean_error(x, reconstruct(t.factors, x.field_name()));
  return {std::move(t.factors), err};
}

/// Leading k singular values, nonincreasing.
inline Vector singular_spectrum(const Matrix& x, Index k) {
  const Index full = std::min(x.rows(), x.cols());
  if (k < 1 || k > full)
    throw InvalidArgument("spectrum length " + std::to_string(k) + " outside [1, " +
                          std::to_string(full) + "]");
  if (!x.allFinite()) throw NumericalError("SVD input contains non-finite entries");
  Eigen::BDCSVD<Matrix> svd(x);
  return svd.singularValues().head(k);
}

inline Vector singular_spectrum(const SnapshotMatrix& x, Index k) {
  return singular_spectrum(x.data(), k);
}

/// Smallest r whose truncation error relative to ||X||_F is at most tol.
inline Index rank_for_energy(const SnapshotMatrix& x, double tol) {
  if (!(tol >= 0.0)) throw InvalidArgument("energy tolerance must be nonnegative");
  const double total = frobenius_norm(x);
  if (total == 0.0) return 0;
  const Vector s = singular_spectrum(x, std::min(x.rows(), x.cols()));
  for (Index r = 0; r < s.size(); ++r)
    if (s.tail(s.size() - r).norm() <= tol * total) return r;
  return s.size();
}

}  // namespace spod
