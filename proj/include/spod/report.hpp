#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "spod/decompose.hpp"
#include "spod/field_data.hpp"
#include "spod/transport.hpp"

namespace spod::report {

using Json = nlohmann::json;  // std::map-backed objects: keys serialize sorted

inline Json digest(const SnapshotMatrix& x) {
  return Json{{"field", x.field_name()},
              {"rows", x.rows()},
              {"cols", x.cols()},
              {"nx", x.space().nx},
              {"ny", x.space().ny},
              {"nt", x.time().nt},
              {"L", x.space().length},
              {"t0", x.time().t0},
              {"dt", x.time().dt},
              {"periodic", x.space().periodic},
              {"frobenius_norm", frobenius_norm(x)}};
}

inline const char* to_string(BoundaryPolicy b) {
  return b == BoundaryPolicy::PeriodicWrap ? "periodic" : "constant";
}

inline Json to_json(const std::optional<FrameDiagnostics>& d) {
  if (!d) return nullptr;
  return Json{{"max_orth_error", d->max_orth_error}, {"sigma_ratio", d->sigma_ratio}};
}

inline Json to_json(const IterationRecord& r) {
  Json frames = Json::array();
  for (const auto& f : r.frames) frames.push_back(to_json(f));
  return Json{{"iteration", r.iteration},
              {"residual_before", r.residual_before},
              {"lsq_objective", r.lsq_objective},
              {"residual_norm", r.residual_norm},
              {"rel_mean_error", r.rel_mean_error},
              {"frames", frames}};
}

inline Json to_json(const ConvergenceReport& c) {
  Json its = Json::array();
  for (const auto& r : c.iterations) its.push_back(to_json(r));
  return Json{{"iterations_run", c.iterations_run},
              {"stop_reason", to_string(c.stop_reason)},
              {"iterations", its}};
}

inline Json to_json(const LowRankFactors& f) {
  return Json{{"rank", f.rank()},
              {"sigma", std::vector<double>(f.sigma.data(), f.sigma.data() + f.sigma.size())}};
}

inline Json to_json(const VelocityScanResult& s) {
  Json maxima = Json::array();
  for (const auto& m : s.maxima)
    maxima.push_back(
        Json{{"sample", m.sample}, {"velocity", m.velocity}, {"leading_sigma", m.leading_sigma}});
  Index global = 0;
  for (Index i = 1; i < s.spectra.rows(); ++i)
    if (s.spectra(i, 0) > s.spectra(global, 0)) global = i;
  return Json{{"maxima", maxima},
              {"global_maximum",
               Json{{"sample", global},
                    {"velocity", s.velocities[static_cast<std::size_t>(global)]},
                    {"leading_sigma", s.spectra(global, 0)}}}};
}

/// Top-level document shared by every command.
struct RunReport {
  std::string command;
  std::vector<std::string> argv;
  Json input = Json::object();
  Json config = Json::object();
  Json results = Json::object();
  double duration_seconds = 0.0;

  Json to_json() const {
    return Json{{"command", command},
                {"argv", argv},
                {"input", input},
                {"config", config},
                {"results", results},
                {"duration_seconds", duration_seconds}};
  }

  std::string dump() const { return to_json().dump(2) + "\n"; }
};

}  // namespace spod::report
