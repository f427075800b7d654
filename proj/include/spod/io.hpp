#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "spod/decompose.hpp"
#include "spod/error.hpp"
#include "spod/field_data.hpp"
#include "spod/low_rank.hpp"
#include "spod/shift.hpp"

namespace spod::io {

namespace fs = std::filesystem;

/// Shortest decimal string that parses back to the same binary64 value.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text, const std::string& where) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty())
    throw FormatError(where + ": cannot parse number '" + std::string(text) + "'");
  if (!std::isfinite(v)) throw FormatError(where + ": non-finite value");
  return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? line.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::ofstream open_for_write(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  return out;
}

inline std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

/// Matrix CSV: one line per row, comma separated, no header.
inline void write_matrix_csv(const fs::path& path, const Matrix& m) {
  auto out = open_for_write(path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw FormatError("write failed for " + path.string());
}

inline Matrix read_matrix_csv(const fs::path& path) {
  const auto lines = read_lines(path);
  std::vector<std::vector<double>> rows;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(n + 1);
    std::vector<double> row;
    for (auto field : split(lines[n], ',')) row.push_back(parse_double(field, where));
    if (!rows.empty() && row.size() != rows.front().size())
      throw FormatError(where + ": expected " + std::to_string(rows.front().size()) +
                        " columns, found " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError(path.string() + ": empty matrix file");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return m;
}

/// Sidecar path of a matrix file: same stem, ".meta" extension.
inline fs::path metadata_path(const fs::path& matrix_path) {
  fs::path p = matrix_path;
  p.replace_extension(".meta");
  return p;
}

inline void write_metadata(const fs::path& path, const SnapshotMatrix& x) {
  auto out = open_for_write(path);
  const auto& s = x.space();
  const auto& t = x.time();
  out << "nx=" << s.nx << '\n'
      << "ny=" << s.ny << '\n'
      << "nt=" << t.nt << '\n'
      << "L=" << format_double(s.length) << '\n'
      << "t0=" << format_double(t.t0) << '\n'
      << "dt=" << format_double(t.dt) << '\n'
      << "periodic=" << (s.periodic ? "true" : "false") << '\n'
      << "field=" << x.field_name() << '\n';
}

struct Metadata {
  SpaceGrid space;
  TimeGrid time;
  std::string field;
};

inline Metadata read_metadata(const fs::path& path) {
  std::map<std::string, std::string> kv;
  const auto lines = read_lines(path);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (lines[n].empty() || lines[n].front() == '#') continue;
    const auto eq = lines[n].find('=');
    if (eq == std::string::npos)
      throw FormatError(path.string() + ":" + std::to_string(n + 1) + ": expected key=value");
    kv[lines[n].substr(0, eq)] = lines[n].substr(eq + 1);
  }
  const auto need = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw FormatError(path.string() + ": missing key '" + key + "'");
    return it->second;
  };
  const auto integer = [&](const char* key) {
    const auto& text = need(key);
    long long v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
      throw FormatError(path.string() + ": key '" + key + "' is not an integer");
    return static_cast<Index>(v);
  };
  const auto real = [&](const char* key) { return parse_double(need(key), path.string()); };
  const auto& periodic = need("periodic");
  if (periodic != "true" && periodic != "false")
    throw FormatError(path.string() + ": periodic must be true or false");
  Metadata m{SpaceGrid{integer("nx"), integer("ny"), real("L"), periodic == "true"},
             TimeGrid{integer("nt"), real("t0"), real("dt")}, need("field")};
  try {
    m.space.validate();
    m.time.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return m;
}

inline void write_snapshot(const fs::path& matrix_path, const SnapshotMatrix& x) {
  write_matrix_csv(matrix_path, x.data());
  write_metadata(metadata_path(matrix_path), x);
}

inline SnapshotMatrix read_snapshot(const fs::path& matrix_path) {
  const auto meta = read_metadata(metadata_path(matrix_path));
  Matrix data = read_matrix_csv(matrix_path);
  try {
    return {std::move(data), meta.space, meta.time, meta.field};
  } catch (const InvalidArgument& e) {
    throw FormatError(matrix_path.string() + ": " + e.what());
  }
}

/// Shift profile file: header "t,xshift", then one "t,xshift" line per
/// snapshot. An optional "# origin=<x>" line records the absolute coordinate
/// the displacements are measured from (written by the front tracker).
inline void write_shift_profile(const fs::path& path, const ShiftProfile& p,
                                std::optional<double> origin = std::nullopt) {
  auto out = open_for_write(path);
  if (origin) out << "# origin=" << format_double(*origin) << '\n';
  out << "t,xshift\n";
  for (Index j = 0; j < p.time().nt; ++j)
    out << format_double(p.time().t(j)) << ',' << format_double(p.at(j)) << '\n';
}

struct ShiftFile {
  ShiftProfile profile;
  std::optional<double> origin;
};

inline ShiftFile read_shift_profile(const fs::path& path, const TimeGrid& time) {
  std::vector<double> values;
  std::optional<double> origin;
  const auto lines = read_lines(path);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto& line = lines[n];
    const std::string where = path.string() + ":" + std::to_string(n + 1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view key = "# origin=";
      if (line.starts_with(key)) origin = parse_double(std::string_view(line).substr(key.size()), where);
      continue;
    }
    if (line.starts_with("t,")) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 2) throw FormatError(where + ": expected two columns t,xshift");
    const double t = parse_double(fields[0], where);
    const auto j = static_cast<Index>(values.size());
    if (j >= time.nt) throw FormatError(path.string() + ": more rows than snapshots");
    const double expected = time.t(j);
    if (std::abs(t - expected) > 1e-12 * std::max(1.0, std::abs(expected)))
      throw FormatError(where + ": time " + format_double(t) + " does not match snapshot time " +
                        format_double(expected));
    values.push_back(parse_double(fields[1], where));
  }
  if (static_cast<Index>(values.size()) != time.nt)
    throw FormatError(path.string() + ": " + std::to_string(values.size()) + " rows for " +
                      std::to_string(time.nt) + " snapshots");
  return {ShiftProfile::tabulated(std::move(values), time), origin};
}

inline void write_vector_csv(const fs::path& path, const Vector& v) {
  auto out = open_for_write(path);
  for (Index i = 0; i < v.size(); ++i) out << format_double(v(i)) << '\n';
}

/// U.csv, sigma.csv and V.csv in `dir`.
inline void write_factors(const fs::path& dir, const LowRankFactors& f) {
  write_matrix_csv(dir / "U.csv", f.U);
  write_vector_csv(dir / "sigma.csv", f.sigma);
  write_matrix_csv(dir / "V.csv", f.V);
}

/// One frame_<k> directory per frame with factors and shift.csv.
inline void write_decomposition(const fs::path& dir, const FrameDecomposition& d) {
  for (std::size_t k = 0; k < d.frames.size(); ++k) {
    const auto frame_dir = dir / ("frame_" + std::to_string(k));
    write_factors(frame_dir, d.frames[k].factors);
    write_shift_profile(frame_dir / "shift.csv", d.frames[k].profile);
  }
}

}  // namespace spod::io
