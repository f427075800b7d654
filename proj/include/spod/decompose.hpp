#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spod/error.hpp"
#include "spod/field_data.hpp"
#include "spod/low_rank.hpp"
#include "spod/parallel.hpp"
#include "spod/shift.hpp"

namespace spod {

/// Shift profiles and ranks of the co-moving frames to decompose into.
struct FrameSpec {
  std::vector<ShiftProfile> profiles;
  std::vector<Index> ranks;
  std::vector<Index> residual_ranks;
  BoundaryPolicy boundary = BoundaryPolicy::PeriodicWrap;

  std::size_t size() const { return profiles.size(); }

  void validate(const SnapshotMatrix& x) const {
    if (profiles.empty()) throw InvalidArgument("frame spec needs at least one frame");
    if (ranks.size() != profiles.size())
      throw InvalidArgument("frame spec: " + std::to_string(ranks.size()) + " ranks for " +
                            std::to_string(profiles.size()) + " frames");
    if (residual_ranks.size() != profiles.size())
      throw InvalidArgument("frame spec: " + std::to_string(residual_ranks.size()) +
                            " residual ranks for " + std::to_string(profiles.size()) +
                            " frames");
    if (boundary == BoundaryPolicy::PeriodicWrap && !x.space().periodic)
      throw InvalidArgument("periodic wrap requested on a non-periodic grid");
    const Index full = std::min(x.rows(), x.cols());
    for (std::size_t k = 0; k < profiles.size(); ++k) {
      if (!detail::times_match(profiles[k].time(), x.time()))
        throw InvalidArgument("frame " + std::to_string(k) +
                              ": shift profile time grid does not match the data");
      if (ranks[k] < 0 || ranks[k] > full)
        throw InvalidArgument("frame " + std::to_string(k) + ": rank out of range");
      if (residual_ranks[k] < 1 || residual_ranks[k] > full)
        throw InvalidArgument("frame " + std::to_string(k) + ": residual rank out of range");
    }
  }
};

struct Frame {
  ShiftProfile profile;
  LowRankFactors factors;
};

/// Output of the decomposition: X ~ sum_k T^{p_k}(U_k S_k V_k^T).
struct FrameDecomposition {
  std::vector<Frame> frames;
  SpaceGrid space;
  TimeGrid time;
  BoundaryPolicy boundary = BoundaryPolicy::PeriodicWrap;
};

struct FrameDiagnostics {
  double max_orth_error;  // max_l |<u_l v_l^T, T^{-p}R>| / (|u_l v_l^T| |T^{-p}R|)
  double sigma_ratio;     // max(Sigma_r) / min(Sigma~)
};

struct IterationRecord {
  Index iteration = 0;            // 1-based
  double residual_before = 0.0;   // ||R|| at the start of the iteration
  double lsq_objective = 0.0;     // ||X^ - X|| after the least-squares step
  double residual_norm = 0.0;     // ||X - X~|| after the update
  double rel_mean_error = 0.0;    // residual_norm / ||X||
  std::vector<std::optional<FrameDiagnostics>> frames;  // empty for rank-0 frames
};

enum class StopReason { Tolerance, Stalled, MaxIterations };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::Tolerance:
      return "tolerance";
    case StopReason::Stalled:
      return "stalled";
    case StopReason::MaxIterations:
      return "max_iterations";
  }
  return "unknown";
}

struct ConvergenceReport {
  std::vector<IterationRecord> iterations;
  Index iterations_run = 0;
  StopReason stop_reason = StopReason::MaxIterations;
};

struct SpodOptions {
  Index max_iter = 50;
  double tol = 1e-10;
  double stall_rel = 1e-10;
};

struct SpodResult {
  FrameDecomposition decomposition;
  ConvergenceReport report;
};

/// Multi-shift & reduce: every frame is decomposed from the full X in its own
/// co-moving system.
inline std::vector<LowRankFactors> msr(const SnapshotMatrix& x, const FrameSpec& spec) {
  if (spec.profiles.empty() || spec.ranks.size() != spec.profiles.size())
    throw InvalidArgument("msr: one rank per frame required");
  std::vector<LowRankFactors> out(spec.size(), LowRankFactors::empty(x.space(), x.time()));
  parallel_for(
      static_cast<Index>(spec.size()),
      [&](Index k) {
        const auto idx = static_cast<std::size_t>(k);
        const Matrix shifted =
            shift_apply(x.data(), x.space(), negate(spec.profiles[idx]), spec.boundary);
        out[idx] =
            detail::truncate_matrix(shifted, spec.ranks[idx], x.space(), x.time()).factors;
      },
      1);
  return out;
}

inline Matrix naive_reconstruct_matrix(const FrameDecomposition& d) {
  Matrix out = Matrix::Zero(d.space.points(), d.time.nt);
  for (const auto& f : d.frames) {
    if (f.factors.rank() == 0) continue;
    out += shift_apply(reconstruct_matrix(f.factors), d.space, f.profile, d.boundary);
  }
  return out;
}

/// X~ = sum_k T^{p_k}(U_k S_k V_k^T).
inline SnapshotMatrix naive_reconstruct(const FrameDecomposition& d,
                                        std::string field_name = "field") {
  return {naive_reconstruct_matrix(d), d.space, d.time, std::move(field_name)};
}

/// Rank-one ansatz term T^{profile}(u v^T).
struct BasisElement {
  ShiftProfile profile;
  Vector u;
  Vector v;
};

namespace detail {

inline constexpr double kMaxGramCondition = 1e12;

/// Minimizes ||sum_a alpha_a A_a - X||_F through the Gram system
/// G alpha = g. Ill-conditioned systems get Tikhonov regularization
/// lambda = 1e-12 trace(G) / dim(G).
inline Vector solve_gram(std::span<const Matrix> terms, const Matrix& x) {
  const auto n = static_cast<Index>(terms.size());
  Matrix gram(n, n);
  Vector rhs(n);
  parallel_for(
      n,
      [&](Index a) {
        const auto ia = static_cast<std::size_t>(a);
        rhs(a) = terms[ia].cwiseProduct(x).sum();
        for (Index b = 0; b <= a; ++b)
          gram(a, b) = terms[ia].cwiseProduct(terms[static_cast<std::size_t>(b)]).sum();
      },
      1);
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  const double trace = gram.trace();
  if (!(trace > 0.0)) return Vector::Zero(n);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  if (!(lmin > 0.0) || lmax / lmin > kMaxGramCondition)
    gram.diagonal().array() += 1e-12 * trace / static_cast<double>(n);
  Vector alpha = gram.ldlt().solve(rhs);
  if (!alpha.allFinite()) throw NumericalError("least-squares solve produced non-finite values");
  return alpha;
}

inline Matrix combine(std::span<const Matrix> terms, const Vector& alpha, Index rows,
                      Index cols) {
  Matrix out = Matrix::Zero(rows, cols);
  for (std::size_t a = 0; a < terms.size(); ++a)
    out += alpha(static_cast<Index>(a)) * terms[a];
  return out;
}

/// Per-frame view of a residual: T^{-p_k}(R), its norm, and leading modes.
struct ShiftedResidual {
  Matrix shifted;
  double norm = 0.0;
  LowRankFactors modes;
};

inline std::vector<ShiftedResidual> analyse_residual(const Matrix& residual,
                                                     const SnapshotMatrix& x,
                                                     const std::vector<ShiftProfile>& profiles,
                                                     const std::vector<Index>& ranks,
                                                     BoundaryPolicy boundary) {
  std::vector<ShiftedResidual> out(profiles.size());
  parallel_for(
      static_cast<Index>(profiles.size()),
      [&](Index k) {
        const auto idx = static_cast<std::size_t>(k);
        auto& r = out[idx];
        r.shifted = shift_apply(residual, x.space(), negate(profiles[idx]), boundary);
        r.norm = r.shifted.norm();
        r.modes = truncate_matrix(r.shifted, ranks[idx], x.space(), x.time()).factors;
      },
      1);
  return out;
}

inline std::optional<FrameDiagnostics> frame_diagnostics(const LowRankFactors& f,
                                                         const ShiftedResidual& r) {
  if (f.rank() == 0) return std::nullopt;
  if (r.norm == 0.0) return FrameDiagnostics{0.0, 0.0};
  double orth = 0.0;
  for (Index l = 0; l < f.rank(); ++l) {
    const double inner = f.U.col(l).dot(r.shifted * f.V.col(l));
    const double mode_norm = f.U.col(l).norm() * f.V.col(l).norm();
    orth = std::max(orth, std::abs(inner) / (mode_norm * r.norm));
  }
  const double leading = r.modes.rank() > 0 ? r.modes.sigma(0) : 0.0;
  const double smallest = f.sigma.minCoeff();
  const double ratio = smallest > 0.0 ? leading / smallest
                                      : std::numeric_limits<double>::infinity();
  return FrameDiagnostics{orth, ratio};
}

}  // namespace detail

/// Least-squares weights of the rank-one terms T^{p_a}(u_a v_a^T) that best
/// reproduce X in the Frobenius norm.
inline Vector lsq_coefficients(const SnapshotMatrix& x, std::span<const BasisElement> basis,
                               BoundaryPolicy boundary) {
  if (basis.empty()) throw InvalidArgument("lsq_coefficients: empty basis");
  std::vector<Matrix> terms;
  terms.reserve(basis.size());
  for (const auto& b : basis) {
    if (b.u.size() != x.rows() || b.v.size() != x.cols())
      throw InvalidArgument("lsq_coefficients: basis vector sizes differ from the data");
    terms.push_back(shift_apply(Matrix(b.u * b.v.transpose()), x.space(), b.profile, boundary));
  }
  return detail::solve_gram(terms, x.data());
}

/// Orthogonality error and singular-value ratio per frame of a decomposition.
inline std::vector<FrameDiagnostics> convergence_criteria(const SnapshotMatrix& x,
                                                          const FrameDecomposition& d) {
  if (d.frames.empty()) throw InvalidArgument("convergence_criteria: no frames");
  std::vector<ShiftProfile> profiles;
  for (std::size_t k = 0; k < d.frames.size(); ++k) {
    if (d.frames[k].factors.rank() == 0)
      throw InvalidArgument("convergence_criteria: frame " + std::to_string(k) +
                            " has no retained modes");
    profiles.push_back(d.frames[k].profile);
  }
  const Matrix residual = x.data() - naive_reconstruct_matrix(d);
  const auto shifted = detail::analyse_residual(
      residual, x, profiles, std::vector<Index>(profiles.size(), 1), d.boundary);
  std::vector<FrameDiagnostics> out;
  for (std::size_t k = 0; k < d.frames.size(); ++k)
    out.push_back(*detail::frame_diagnostics(d.frames[k].factors, shifted[k]));
  return out;
}

/// Iterative shifted POD. Each iteration forms the residual, extracts
/// residual modes per frame, refits diagonal weights of all current and
/// residual modes by least squares, re-truncates every frame by SVD, and
/// updates the approximation. `warm_start`, when given, supplies the initial
/// frame factors (same profiles, ranks may be lower than `spec.ranks`).
inline SpodResult spod(const SnapshotMatrix& x, const FrameSpec& spec,
                       const SpodOptions& options = {},
                       const FrameDecomposition* warm_start = nullptr) {
  spec.validate(x);
  if (options.max_iter < 1) throw InvalidArgument("spod: max_iter must be at least 1");
  if (!(options.tol >= 0.0)) throw InvalidArgument("spod: tolerance must be nonnegative");

  const auto n_frames = spec.size();
  FrameDecomposition d{{}, x.space(), x.time(), spec.boundary};
  for (std::size_t k = 0; k < n_frames; ++k)
    d.frames.push_back({spec.profiles[k], LowRankFactors::empty(x.space(), x.time())});
  if (warm_start) {
    if (warm_start->frames.size() != n_frames)
      throw InvalidArgument("spod: warm start has a different frame count");
    for (std::size_t k = 0; k < n_frames; ++k) {
      if (warm_start->frames[k].factors.rank() > spec.ranks[k])
        throw InvalidArgument("spod: warm start rank exceeds the requested rank");
      d.frames[k].factors = warm_start->frames[k].factors;
    }
  }

  ConvergenceReport report;
  const double x_norm = frobenius_norm(x);
  if (x_norm == 0.0) {
    report.stop_reason = StopReason::Tolerance;
    return {std::move(d), std::move(report)};
  }

  Matrix approx = naive_reconstruct_matrix(d);
  Matrix residual = x.data() - approx;
  double residual_norm = residual.norm();
  auto state =
      detail::analyse_residual(residual, x, spec.profiles, spec.residual_ranks, spec.boundary);

  for (Index it = 1; it <= options.max_iter; ++it) {
    IterationRecord rec;
    rec.iteration = it;
    rec.residual_before = residual_norm;

    // Ansatz: current modes (baseline weight sigma) and residual modes (weight 0).
    std::vector<std::size_t> owner;
    std::vector<Vector> us, vs;
    std::vector<double> baseline;
    for (std::size_t k = 0; k < n_frames; ++k) {
      const auto& cur = d.frames[k].factors;
      for (Index l = 0; l < cur.rank(); ++l) {
        owner.push_back(k);
        us.push_back(cur.U.col(l));
        vs.push_back(cur.V.col(l));
        baseline.push_back(cur.sigma(l));
      }
      const auto& res = state[k].modes;
      for (Index l = 0; l < res.rank(); ++l) {
        owner.push_back(k);
        us.push_back(res.U.col(l));
        vs.push_back(res.V.col(l));
        baseline.push_back(0.0);
      }
    }
    const auto n_terms = static_cast<Index>(owner.size());
    std::vector<Matrix> terms(owner.size());
    parallel_for(
        n_terms,
        [&](Index a) {
          const auto ia = static_cast<std::size_t>(a);
          terms[ia] = shift_apply(Matrix(us[ia] * vs[ia].transpose()), x.space(),
                                  spec.profiles[owner[ia]], spec.boundary);
        },
        1);

    Vector alpha = Vector::Zero(n_terms);
    if (n_terms > 0) {
      alpha = detail::solve_gram(terms, x.data());
      const Vector alpha0 = Eigen::Map<const Vector>(baseline.data(), n_terms);
      const double obj = (x.data() - detail::combine(terms, alpha, x.rows(), x.cols())).norm();
      const double obj0 = (x.data() - detail::combine(terms, alpha0, x.rows(), x.cols())).norm();
      // The baseline weights reproduce the current approximation; keep them
      // if regularization or rounding made the solve worse.
      rec.lsq_objective = obj;
      if (obj0 < obj) {
        alpha = alpha0;
        rec.lsq_objective = obj0;
      }
    } else {
      rec.lsq_objective = x_norm;
    }

    // Re-truncate every frame from the weighted sum of its modes.
    parallel_for(
        static_cast<Index>(n_frames),
        [&](Index kk) {
          const auto k = static_cast<std::size_t>(kk);
          Matrix frame_sum = Matrix::Zero(x.rows(), x.cols());
          for (std::size_t a = 0; a < owner.size(); ++a)
            if (owner[a] == k) frame_sum += alpha(static_cast<Index>(a)) * us[a] * vs[a].transpose();
          d.frames[k].factors =
              detail::truncate_matrix(frame_sum, spec.ranks[k], x.space(), x.time()).factors;
        },
        1);

    approx = naive_reconstruct_matrix(d);
    residual = x.data() - approx;
    const double previous = residual_norm;
    residual_norm = residual.norm();
    if (!std::isfinite(residual_norm))
      throw NumericalError("spod: residual became non-finite in iteration " + std::to_string(it));
    rec.residual_norm = residual_norm;
    rec.rel_mean_error = residual_norm / x_norm;

    state = detail::analyse_residual(residual, x, spec.profiles, spec.residual_ranks,
                                     spec.boundary);
    for (std::size_t k = 0; k < n_frames; ++k)
      rec.frames.push_back(detail::frame_diagnostics(d.frames[k].factors, state[k]));
    report.iterations.push_back(std::move(rec));
    report.iterations_run = it;

    if (residual_norm / x_norm <= options.tol) {
      report.stop_reason = StopReason::Tolerance;
      return {std::move(d), std::move(report)};
    }
    if (previous > 0.0 && (previous - residual_norm) / previous < options.stall_rel) {
      report.stop_reason = StopReason::Stalled;
      return {std::move(d), std::move(report)};
    }
  }
  report.stop_reason = StopReason::MaxIterations;
  return {std::move(d), std::move(report)};
}

struct AdaptiveOptions {
  double target = 1e-2;        // relative mean error to reach
  Index max_total_rank = 50;   // stop adding modes beyond this budget
  SpodOptions inner;
};

struct AdaptiveResult {
  SpodResult result;
  std::vector<std::vector<Index>> rank_history;  // ranks used by each spod run
};

/// Mode-budget loop: starts from spec.ranks and, while the error target is
/// missed, gives one more mode to the frame whose shifted residual has the
/// largest leading singular value, warm-starting from the previous result.
inline AdaptiveResult spod_adaptive(const SnapshotMatrix& x, FrameSpec spec,
                                    const AdaptiveOptions& options) {
  AdaptiveResult out{spod(x, spec, options.inner), {spec.ranks}};
  const double x_norm = frobenius_norm(x);
  const Index full = std::min(x.rows(), x.cols());
  for (;;) {
    const auto& rep = out.result.report;
    const double err = rep.iterations.empty() ? 0.0 : rep.iterations.back().rel_mean_error;
    if (err <= options.target) break;
    Index total = 0;
    for (Index r : spec.ranks) total += r;
    if (total >= options.max_total_rank) break;

    const Matrix residual = x.data() - naive_reconstruct_matrix(out.result.decomposition);
    const auto state = detail::analyse_residual(residual, x, spec.profiles,
                                                std::vector<Index>(spec.size(), 1), spec.boundary);
    std::optional<std::size_t> pick;
    for (std::size_t k = 0; k < spec.size(); ++k) {
      if (spec.ranks[k] >= full || state[k].modes.rank() == 0) continue;
      if (!pick || state[k].modes.sigma(0) > state[*pick].modes.sigma(0)) pick = k;
    }
    if (!pick || x_norm == 0.0) break;
    ++spec.ranks[*pick];
    out.result = spod(x, spec, options.inner, &out.result.decomposition);
    out.rank_history.push_back(spec.ranks);
  }
  return out;
}

}  // namespace spod
