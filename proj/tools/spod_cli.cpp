// spod_cli: generate test fields, scan transport velocities, track fronts,
// and run POD / sPOD decompositions on snapshot matrices.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "spod/spod.hpp"

namespace fs = std::filesystem;
using spod::Index;
using spod::report::Json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenerateArgs {
  std::string kase;
  std::string out = ".";
  std::optional<Index> nx, ny, nt;
  std::optional<double> dt, t0, length, velocity, delta;
};

struct ScanArgs {
  std::string input, out = "scan.csv", boundary = "auto", report;
  double cmin = -1.25, cmax = 1.25;
  Index samples = 101, k = 3;
};

struct SpodArgs {
  std::vector<std::string> inputs;
  std::vector<double> velocities;
  std::vector<std::string> shift_files;
  std::vector<Index> ranks, residual_ranks;
  Index max_iter = 50;
  double tol = 1e-10, stall = 1e-10;
  std::string boundary = "auto", out = "spod_out";
  bool normalize = false;
  std::optional<double> target;
  Index max_total_rank = 50;
};

struct PodArgs {
  std::string input, out = "pod_out";
  Index rank = 1;
};

struct TrackArgs {
  std::string input, out = "track.csv", side = "left", mode = "falling", report;
  double threshold = 0.5;
  std::string partner, partner_out;
  Index blend_halfwidth = 5;
};

struct CompareArgs {
  std::string input, out = "compare.csv", boundary = "auto", report;
  std::vector<double> velocities;
  Index max_rank = 4, max_iter = 50;
  double tol = 1e-10, stall = 1e-10;
};

std::vector<double> column_vector(const spod::Vector& v) {
  return {v.data(), v.data() + v.size()};
}

spod::BoundaryPolicy resolve_boundary(const std::string& flag, const spod::SpaceGrid& space) {
  if (flag == "periodic") return spod::BoundaryPolicy::PeriodicWrap;
  if (flag == "constant") return spod::BoundaryPolicy::ConstantExtrapolation;
  return spod::default_boundary(space);
}

void emit(const spod::report::RunReport& r, const std::vector<fs::path>& files) {
  const std::string text = r.dump();
  std::cout << text;
  for (const auto& f : files) {
    auto out = spod::io::open_for_write(f);
    out << text;
  }
}

std::vector<fs::path> report_files(const std::string& flag) {
  if (flag.empty()) return {};
  return {flag};
}

// ---------------------------------------------------------------- generate

void write_field(const fs::path& dir, const spod::SnapshotMatrix& x, Json& files) {
  const auto path = dir / (x.field_name() + ".csv");
  spod::io::write_snapshot(path, x);
  files.push_back(path.string());
}

void run_generate(const GenerateArgs& a, spod::report::RunReport& rep) {
  namespace an = spod::analytic;
  const fs::path dir = a.out;
  Json files = Json::array();
  spod::analytic::WaveParams params;

  auto [space, time] = an::paper_grid();
  if (a.kase == "crossing-fronts") std::tie(space, time) = an::crossing_fronts_grid();
  if (a.kase == "moving-blob-2d") {
    space = spod::SpaceGrid{64, 32, 1.0, true};
    time = spod::TimeGrid{64, 0.0, 1.0 / 64.0};
  }
  if (a.length) space.length = *a.length;
  if (a.nx) space.nx = *a.nx;
  if (a.ny) space.ny = *a.ny;
  if (a.nt) time.nt = *a.nt;
  if (a.t0) time.t0 = *a.t0;
  if (a.dt) {
    time.dt = *a.dt;
  } else if (a.kase == "crossing-fronts") {
    time.dt = space.dx() / 0.4;
  } else if (a.kase == "moving-blob-2d") {
    time.dt = space.dx();
  }
  params.length = space.length;
  space.validate();
  time.validate();

  spod::analytic::PulseSpec pulse;
  pulse.x0 = 0.5 * space.length;
  pulse.delta = a.delta.value_or(space.length / 50.0);

  Json config{{"case", a.kase}, {"out", a.out},         {"nx", space.nx},
              {"ny", space.ny}, {"nt", time.nt},        {"L", space.length},
              {"t0", time.t0},  {"dt", time.dt},        {"periodic", space.periodic}};

  if (a.kase == "single-pulse" || a.kase == "pressure-pulse") {
    if (space.ny != 1) throw spod::InvalidArgument("--ny must be 1 for " + a.kase);
    const auto q = an::gaussian_pulse(pulse, space.length);
    const auto fields = an::wave_solution(
        q, a.kase == "single-pulse" ? an::zero_profile() : q, params, space, time);
    config.update(Json{{"rho0", params.rho0}, {"c", params.c}, {"x0", pulse.x0},
                       {"delta", pulse.delta}, {"amplitude", pulse.amplitude}});
    write_field(dir, fields.density, files);
    write_field(dir, fields.velocity, files);
  } else if (a.kase == "standing-wave") {
    if (space.ny != 1) throw spod::InvalidArgument("--ny must be 1 for " + a.kase);
    an::StandingWaveSpec spec{{an::Harmonic{1, 1.0, 0.0, 0.0, 0.0}}};
    const auto fields = an::standing_wave(spec, params, space, time);
    config.update(Json{{"rho0", params.rho0}, {"c", params.c}, {"n", 1}, {"beta", 1.0},
                       {"gamma", 0.0}, {"eta", 0.0}, {"zeta", 0.0}});
    write_field(dir, fields.density, files);
    write_field(dir, fields.velocity, files);
  } else if (a.kase == "crossing-fronts") {
    an::CrossingFrontsSpec spec;
    const auto x = an::crossing_fronts(space, time, spec);
    config.update(Json{{"v1", spec.v1},
                       {"v2", spec.v2},
                       {"x1", spec.x1},
                       {"x2", spec.x2},
                       {"width", spec.width},
                       {"jump1", spec.jump1},
                       {"jump2", spec.jump2},
                       {"swap_time", *spec.effective_swap_time(time.t0)}});
    write_field(dir, x, files);
  } else if (a.kase == "moving-blob-2d") {
    const double v = a.velocity.value_or(1.0);
    an::BlobSpec blob;
    const auto x = an::moving_blob_2d(space, time, v, blob);
    config.update(Json{{"velocity", v}, {"x0", blob.x0}, {"y0", blob.y0}, {"radius", blob.radius}});
    write_field(dir, x, files);
  } else {
    throw UsageError("unknown case '" + a.kase + "'");
  }
  rep.config = config;
  rep.results = Json{{"files", files}};
}

// -------------------------------------------------------------------- scan

void run_scan(const ScanArgs& a, spod::report::RunReport& rep) {
  const auto x = spod::io::read_snapshot(a.input);
  rep.input = spod::report::digest(x);
  const auto boundary = resolve_boundary(a.boundary, x.space());
  const auto scan = spod::velocity_scan(x, a.cmin, a.cmax, a.samples, a.k, boundary);

  auto out = spod::io::open_for_write(a.out);
  out << "velocity";
  for (Index l = 0; l < a.k; ++l) out << ",sigma_" << (l + 1);
  out << '\n';
  for (Index i = 0; i < a.samples; ++i) {
    out << spod::io::format_double(scan.velocities[static_cast<std::size_t>(i)]);
    for (Index l = 0; l < a.k; ++l) out << ',' << spod::io::format_double(scan.spectra(i, l));
    out << '\n';
  }

  Json results = spod::report::to_json(scan);
  for (std::size_t m = 0; m < scan.maxima.size(); ++m)
    results["maxima"][m]["refined_velocity"] = spod::refine_maximum(scan, scan.maxima[m].sample);
  results["scan_file"] = a.out;
  rep.config = Json{{"cmin", a.cmin}, {"cmax", a.cmax}, {"samples", a.samples}, {"k", a.k},
                    {"boundary", spod::report::to_string(boundary)}, {"out", a.out}};
  rep.results = results;
}

// -------------------------------------------------------------------- spod

std::vector<Index> default_residual_ranks(const std::vector<Index>& ranks) {
  std::vector<Index> out;
  for (Index r : ranks) out.push_back(std::max<Index>(1, r));
  return out;
}

void run_spod(const SpodArgs& a, spod::report::RunReport& rep) {
  if (a.inputs.empty()) throw UsageError("--input is required");
  if (a.velocities.empty() == a.shift_files.empty())
    throw UsageError("give exactly one of --velocities and --shift-files");

  std::vector<spod::SnapshotMatrix> fields;
  Json digests = Json::array();
  for (const auto& path : a.inputs) {
    fields.push_back(spod::io::read_snapshot(path));
    digests.push_back(spod::report::digest(fields.back()));
  }
  rep.input = fields.size() == 1 ? digests.front() : digests;

  std::vector<double> scales(fields.size(), 1.0);
  if (a.normalize) {
    for (std::size_t f = 0; f < fields.size(); ++f) {
      auto n = spod::normalize_max_abs(fields[f]);
      fields[f] = std::move(n.matrix);
      scales[f] = n.scale;
    }
  }
  std::optional<spod::Stacked> stacked;
  if (fields.size() > 1) stacked = spod::stack_fields(fields);
  const spod::SnapshotMatrix& x = stacked ? stacked->matrix : fields.front();

  spod::FrameSpec spec;
  spec.boundary = resolve_boundary(a.boundary, x.space());
  Json shift_config;
  if (!a.velocities.empty()) {
    for (double c : a.velocities) spec.profiles.push_back(spod::ShiftProfile::constant(c, x.time()));
    shift_config = a.velocities;
  } else {
    for (const auto& path : a.shift_files)
      spec.profiles.push_back(spod::io::read_shift_profile(path, x.time()).profile);
    shift_config = a.shift_files;
  }
  const auto n_frames = spec.profiles.size();
  spec.ranks = a.ranks.empty() ? std::vector<Index>(n_frames, 1) : a.ranks;
  spec.residual_ranks = a.residual_ranks.empty() ? default_residual_ranks(spec.ranks) : a.residual_ranks;
  if (spec.ranks.size() != n_frames)
    throw UsageError("--ranks needs one value per frame (" + std::to_string(n_frames) + ")");
  if (spec.residual_ranks.size() != n_frames)
    throw UsageError("--residual-ranks needs one value per frame (" + std::to_string(n_frames) +
                     ")");

  spod::SpodOptions options{a.max_iter, a.tol, a.stall};
  Json config{{a.velocities.empty() ? "shift_files" : "velocities", shift_config},
              {"ranks", spec.ranks},
              {"residual_ranks", spec.residual_ranks},
              {"max_iter", a.max_iter},
              {"tol", a.tol},
              {"stall", a.stall},
              {"boundary", spod::report::to_string(spec.boundary)},
              {"normalize", a.normalize},
              {"out", a.out},
              {"threads", spod::max_threads()}};

  spod::SpodResult result;
  Json results;
  if (a.target) {
    spod::AdaptiveOptions adaptive{*a.target, a.max_total_rank, options};
    auto ar = spod::spod_adaptive(x, spec, adaptive);
    result = std::move(ar.result);
    results["rank_history"] = ar.rank_history;
    config["target"] = *a.target;
    config["max_total_rank"] = a.max_total_rank;
  } else {
    result = spod::spod(x, spec, options);
  }

  const fs::path dir = a.out;
  spod::io::write_decomposition(dir, result.decomposition);
  spod::Matrix recon = spod::naive_reconstruct_matrix(result.decomposition);
  Json recon_files = Json::array();
  if (!stacked) {
    const auto path = dir / "reconstruction.csv";
    spod::io::write_snapshot(path, fields.front().with_data(recon * scales.front()));
    recon_files.push_back(path.string());
  } else {
    for (std::size_t f = 0; f < fields.size(); ++f) {
      const auto& block = stacked->blocks[f];
      spod::Matrix part = recon.middleRows(block.row_begin, block.rows) * scales[f];
      const auto path = dir / ("reconstruction_" + fields[f].field_name() + ".csv");
      spod::io::write_snapshot(path, fields[f].with_data(std::move(part)));
      recon_files.push_back(path.string());
    }
  }

  const double err = spod::relative_mean_error(
      x, x.with_data(spod::naive_reconstruct_matrix(result.decomposition)));
  Json frames = Json::array();
  for (const auto& f : result.decomposition.frames) frames.push_back(spod::report::to_json(f.factors));
  results["rel_mean_error"] = err;
  results["frames"] = frames;
  results["convergence"] = spod::report::to_json(result.report);
  results["reconstruction_files"] = recon_files;
  if (a.normalize) results["scales"] = scales;
  rep.config = config;
  rep.results = results;
}

// --------------------------------------------------------------------- pod

void run_pod(const PodArgs& a, spod::report::RunReport& rep) {
  const auto x = spod::io::read_snapshot(a.input);
  rep.input = spod::report::digest(x);
  const auto r = spod::pod(x, a.rank);
  const fs::path dir = a.out;
  spod::io::write_factors(dir, r.factors);
  spod::io::write_snapshot(dir / "reconstruction.csv", spod::reconstruct(r.factors, x.field_name()));
  rep.config = Json{{"rank", a.rank}, {"out", a.out}};
  rep.results = Json{{"rel_mean_error", r.rel_error},
                     {"sigma", column_vector(r.factors.sigma)},
                     {"discarded_energy",
                      r.rel_error * spod::frobenius_norm(x)}};
}

// ------------------------------------------------------------------- track

spod::FrontTrack absolute_track(const spod::io::ShiftFile& file, const spod::FrontTrack& like) {
  if (!file.origin)
    throw spod::FormatError("partner shift file has no '# origin=' line; write it with track");
  spod::FrontTrack t = like;
  t.positions = file.profile.values();
  for (double& p : t.positions) p += *file.origin;
  return t;
}

void run_track(const TrackArgs& a, spod::report::RunReport& rep) {
  const auto x = spod::io::read_snapshot(a.input);
  rep.input = spod::report::digest(x);
  const auto side = a.side == "left" ? spod::ScanSide::FromLeft : spod::ScanSide::FromRight;
  const auto sense = a.mode == "rising" ? spod::CrossingSense::Rising : spod::CrossingSense::Falling;
  auto track = spod::threshold_track(x, a.threshold, side, sense);

  Json config{{"threshold", a.threshold}, {"side", a.side}, {"mode", a.mode}, {"out", a.out}};
  Json results;
  if (!a.partner.empty()) {
    const auto partner_file = spod::io::read_shift_profile(a.partner, x.time());
    auto partner = absolute_track(partner_file, track);
    auto [mine, theirs] = spod::crossing_correction(track, partner, a.blend_halfwidth);
    fs::path partner_out = a.partner_out;
    if (partner_out.empty()) {
      partner_out = a.partner;
      partner_out.replace_extension(".corrected.csv");
    }
    spod::io::write_shift_profile(partner_out, spod::to_shift_profile(theirs, x.time()),
                                  theirs.positions.front());
    track = std::move(mine);
    config["cross_correct"] = a.partner;
    config["blend_halfwidth"] = a.blend_halfwidth;
    config["partner_out"] = partner_out.string();
    results["partner_positions"] = theirs.positions;
  }
  spod::io::write_shift_profile(a.out, spod::to_shift_profile(track, x.time()),
                                track.positions.front());
  results["positions"] = track.positions;
  rep.config = config;
  rep.results = results;
}

// ----------------------------------------------------------------- compare

void run_compare(const CompareArgs& a, spod::report::RunReport& rep) {
  const auto x = spod::io::read_snapshot(a.input);
  rep.input = spod::report::digest(x);
  if (a.velocities.empty()) throw UsageError("--velocities is required");
  const Index full = std::min(x.rows(), x.cols());
  if (a.max_rank < 1 || a.max_rank > full)
    throw UsageError("--max-rank must lie in [1, " + std::to_string(full) + "]");
  const auto boundary = resolve_boundary(a.boundary, x.space());
  const auto n_frames = static_cast<Index>(a.velocities.size());

  auto out = spod::io::open_for_write(a.out);
  out << "rank_total,pod_error,spod_error\n";
  Json rows = Json::array();
  for (Index total = 1; total <= a.max_rank; ++total) {
    const double pod_err = spod::pod(x, total).rel_error;
    spod::FrameSpec spec;
    spec.boundary = boundary;
    for (Index k = 0; k < n_frames; ++k) {
      spec.profiles.push_back(
          spod::ShiftProfile::constant(a.velocities[static_cast<std::size_t>(k)], x.time()));
      spec.ranks.push_back(total / n_frames + (k == 0 ? total % n_frames : 0));
    }
    spec.residual_ranks = default_residual_ranks(spec.ranks);
    const auto r = spod::spod(x, spec, {a.max_iter, a.tol, a.stall});
    const double spod_err = spod::relative_mean_error(
        x, x.with_data(spod::naive_reconstruct_matrix(r.decomposition)));
    out << total << ',' << spod::io::format_double(pod_err) << ','
        << spod::io::format_double(spod_err) << '\n';
    rows.push_back(Json{{"rank_total", total},
                        {"ranks", spec.ranks},
                        {"pod_error", pod_err},
                        {"spod_error", spod_err},
                        {"stop_reason", spod::to_string(r.report.stop_reason)}});
  }
  rep.config = Json{{"velocities", a.velocities}, {"max_rank", a.max_rank},
                    {"max_iter", a.max_iter},     {"tol", a.tol},
                    {"stall", a.stall},           {"boundary", spod::report::to_string(boundary)},
                    {"out", a.out}};
  rep.results = Json{{"rows", rows}, {"table_file", a.out}};
}

void apply_thread_env() {
  const char* env = std::getenv("SPOD_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 0) throw UsageError("SPOD_THREADS must be a nonnegative integer");
  spod::set_max_threads(static_cast<unsigned>(n));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shifted POD toolkit"};
  app.require_subcommand(1);
  const auto boundary_check = CLI::IsMember({"auto", "periodic", "constant"});

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "write an analytic test field");
  generate
      ->add_option("--case", gen.kase, "test case")
      ->required()
      ->check(CLI::IsMember(
          {"single-pulse", "pressure-pulse", "standing-wave", "crossing-fronts", "moving-blob-2d"}));
  generate->add_option("--out", gen.out, "output directory")->capture_default_str();
  generate->add_option("--nx", gen.nx, "points along the shifted axis");
  generate->add_option("--ny", gen.ny, "points along the second axis");
  generate->add_option("--nt", gen.nt, "number of snapshots");
  generate->add_option("--dt", gen.dt, "time step");
  generate->add_option("--t0", gen.t0, "start time");
  generate->add_option("--length", gen.length, "domain length");
  generate->add_option("--velocity", gen.velocity, "blob velocity (moving-blob-2d)");
  generate->add_option("--delta", gen.delta, "pulse width (pulse cases)");

  ScanArgs sc;
  auto* scan = app.add_subcommand("scan", "velocity scan of the leading singular values");
  scan->add_option("--input", sc.input, "snapshot matrix CSV")->required();
  scan->add_option("--cmin", sc.cmin)->capture_default_str();
  scan->add_option("--cmax", sc.cmax)->capture_default_str();
  scan->add_option("--samples", sc.samples)->capture_default_str()->check(CLI::Range(Index{3}, Index{1} << 40));
  scan->add_option("-k,--k", sc.k, "singular values per sample")->capture_default_str();
  scan->add_option("--boundary", sc.boundary)->capture_default_str()->check(boundary_check);
  scan->add_option("--out", sc.out, "scan CSV")->capture_default_str();
  scan->add_option("--report", sc.report, "also write the report here");

  SpodArgs sp;
  auto* spodcmd = app.add_subcommand("spod", "shifted POD decomposition");
  spodcmd->add_option("--input", sp.inputs, "snapshot matrix CSV (several are stacked)")
      ->required()
      ->delimiter(',');
  auto* vel = spodcmd->add_option("--velocities", sp.velocities, "frame velocities")->delimiter(',');
  auto* shf = spodcmd->add_option("--shift-files", sp.shift_files, "tabulated shift files")
                  ->delimiter(',');
  vel->excludes(shf);
  spodcmd->add_option("--ranks", sp.ranks)->delimiter(',');
  spodcmd->add_option("--residual-ranks", sp.residual_ranks)->delimiter(',');
  spodcmd->add_option("--max-iter", sp.max_iter)->capture_default_str()->check(CLI::PositiveNumber);
  spodcmd->add_option("--tol", sp.tol)->capture_default_str()->check(CLI::NonNegativeNumber);
  spodcmd->add_option("--stall", sp.stall)->capture_default_str()->check(CLI::NonNegativeNumber);
  spodcmd->add_option("--boundary", sp.boundary)->capture_default_str()->check(boundary_check);
  spodcmd->add_flag("--normalize", sp.normalize, "divide each field by its max-abs entry");
  spodcmd->add_option("--target", sp.target, "adaptive mode: add modes until this error");
  spodcmd->add_option("--max-total-rank", sp.max_total_rank)->capture_default_str();
  spodcmd->add_option("--out", sp.out, "output directory")->capture_default_str();

  PodArgs po;
  auto* podcmd = app.add_subcommand("pod", "classical POD");
  podcmd->add_option("--input", po.input)->required();
  podcmd->add_option("--rank", po.rank)->capture_default_str()->check(CLI::NonNegativeNumber);
  podcmd->add_option("--out", po.out, "output directory")->capture_default_str();

  TrackArgs tr;
  auto* trackcmd = app.add_subcommand("track", "threshold front tracking");
  trackcmd->add_option("--input", tr.input)->required();
  trackcmd->add_option("--threshold", tr.threshold)->capture_default_str();
  trackcmd->add_option("--side", tr.side)->capture_default_str()->check(CLI::IsMember({"left", "right"}));
  trackcmd->add_option("--mode", tr.mode)->capture_default_str()->check(CLI::IsMember({"falling", "rising"}));
  trackcmd->add_option("--out", tr.out, "shift profile CSV")->capture_default_str();
  trackcmd->add_option("--cross-correct", tr.partner, "partner shift profile from an earlier track");
  trackcmd->add_option("--partner-out", tr.partner_out, "where to write the corrected partner");
  trackcmd->add_option("--blend-halfwidth", tr.blend_halfwidth)->capture_default_str();
  trackcmd->add_option("--report", tr.report, "also write the report here");

  CompareArgs cm;
  auto* comparecmd = app.add_subcommand("compare", "POD vs sPOD error over total rank");
  comparecmd->add_option("--input", cm.input)->required();
  comparecmd->add_option("--velocities", cm.velocities)->required()->delimiter(',');
  comparecmd->add_option("--max-rank", cm.max_rank)->capture_default_str();
  comparecmd->add_option("--max-iter", cm.max_iter)->capture_default_str()->check(CLI::PositiveNumber);
  comparecmd->add_option("--tol", cm.tol)->capture_default_str();
  comparecmd->add_option("--stall", cm.stall)->capture_default_str();
  comparecmd->add_option("--boundary", cm.boundary)->capture_default_str()->check(boundary_check);
  comparecmd->add_option("--out", cm.out, "table CSV")->capture_default_str();
  comparecmd->add_option("--report", cm.report, "also write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  spod::report::RunReport rep;
  rep.argv.assign(argv + 1, argv + argc);
  const auto start = std::chrono::steady_clock::now();
  const auto finish = [&] {
    rep.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  try {
    apply_thread_env();
    if (*generate) {
      rep.command = "generate";
      run_generate(gen, rep);
      finish();
      emit(rep, {fs::path(gen.out) / "report.json"});
    } else if (*scan) {
      rep.command = "scan";
      run_scan(sc, rep);
      finish();
      emit(rep, report_files(sc.report));
    } else if (*spodcmd) {
      rep.command = "spod";
      run_spod(sp, rep);
      finish();
      emit(rep, {fs::path(sp.out) / "report.json"});
    } else if (*podcmd) {
      rep.command = "pod";
      run_pod(po, rep);
      finish();
      emit(rep, {fs::path(po.out) / "report.json"});
    } else if (*trackcmd) {
      rep.command = "track";
      run_track(tr, rep);
      finish();
      emit(rep, report_files(tr.report));
    } else if (*comparecmd) {
      rep.command = "compare";
      run_compare(cm, rep);
      finish();
      emit(rep, report_files(cm.report));
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const spod::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const spod::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
