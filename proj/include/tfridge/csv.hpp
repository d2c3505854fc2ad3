#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tfridge/core.hpp"
#include "tfridge/errors.hpp"
#include "tfridge/ridge.hpp"
#include "tfridge/spectral.hpp"
#include "tfridge/wavelet.hpp"

namespace tfridge::io {

namespace detail {

/// Full-precision decimal rendering that round-trips doubles exactly.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& tok, const std::string& where) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || (end && *end != '\0'))
    throw IoError("cannot parse number '" + tok + "' in " + where);
  return v;
}

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string tok;
  std::istringstream ss(line);
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

// Infer a uniform grid from a time column; reject non-uniform spacing.
inline TimeGrid infer_grid(const std::vector<double>& times,
                           const std::string& where) {
  if (times.size() < 2) throw TooFewSamples(where + ": need at least 2 rows");
  const double t0 = times.front();
  const double dt =
      (times.back() - t0) / static_cast<double>(times.size() - 1);
  if (!(dt > 0.0)) throw NonUniformGrid(where + ": time column not increasing");
  const double tol = 1e-9 * std::max(1.0, times.back() - t0);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double expect = t0 + static_cast<double>(i) * dt;
    if (std::abs(times[i] - expect) > tol)
      throw NonUniformGrid(where + ": non-uniform time step at row " +
                           std::to_string(i) + " (t=" + fmt(times[i]) +
                           ", expected " + fmt(expect) + ")");
  }
  return TimeGrid(t0, dt, times.size());
}

}  // namespace detail

/// Write content to path atomically: temp file in the same directory, then
/// rename over the target.
inline void atomic_write(const std::filesystem::path& path,
                         const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot rename " + tmp.string() + " to " + path.string() +
                  ": " + ec.message());
  }
}

/// `t,value` rows at full precision (signal.csv, coherence.csv).
inline void write_time_series(const std::filesystem::path& path,
                              const TimeSeries& ts) {
  std::string out = "t,value\n";
  for (std::size_t i = 0; i < ts.size(); ++i) {
    out += detail::fmt(ts.time(i));
    out += ',';
    out += detail::fmt(ts.value(i));
    out += '\n';
  }
  atomic_write(path, out);
}

inline TimeSeries read_time_series(const std::filesystem::path& path) {
  const auto lines = detail::read_lines(path);
  if (lines.empty() || detail::split_line(lines[0]) !=
                           std::vector<std::string>{"t", "value"})
    throw IoError(path.string() + ": expected header 't,value'");
  std::vector<double> times, values;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto tok = detail::split_line(lines[i]);
    if (tok.size() != 2)
      throw IoError(path.string() + ": row " + std::to_string(i) +
                    " has " + std::to_string(tok.size()) + " columns, expected 2");
    times.push_back(detail::parse_double(tok[0], path.string()));
    values.push_back(detail::parse_double(tok[1], path.string()));
  }
  return TimeSeries(detail::infer_grid(times, path.string()), std::move(values));
}

/// `omega,mag` rows (spectrum.csv).
inline void write_spectrum(const std::filesystem::path& path, const Spectrum& sp) {
  std::string out = "omega,mag\n";
  for (std::size_t i = 0; i < sp.freqs.size(); ++i) {
    out += detail::fmt(sp.freqs[i]);
    out += ',';
    out += detail::fmt(sp.mags[i]);
    out += '\n';
  }
  atomic_write(path, out);
}

inline Spectrum read_spectrum(const std::filesystem::path& path) {
  const auto lines = detail::read_lines(path);
  if (lines.empty() || detail::split_line(lines[0]) !=
                           std::vector<std::string>{"omega", "mag"})
    throw IoError(path.string() + ": expected header 'omega,mag'");
  Spectrum sp;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto tok = detail::split_line(lines[i]);
    if (tok.size() != 2)
      throw IoError(path.string() + ": row " + std::to_string(i) +
                    " has " + std::to_string(tok.size()) + " columns, expected 2");
    sp.freqs.push_back(detail::parse_double(tok[0], path.string()));
    sp.mags.push_back(detail::parse_double(tok[1], path.string()));
  }
  return sp;
}

/// Dense matrix layout (scalogram.csv): first row `t,<times...>`, then one
/// row per frequency, `omega_k,<mags...>` from highest to lowest frequency.
inline void write_scalogram(const std::filesystem::path& path,
                            const Scalogram& scal) {
  std::string out = "t";
  for (std::size_t i = 0; i < scal.n_times(); ++i) {
    out += ',';
    out += detail::fmt(scal.grid().time(i));
  }
  out += '\n';
  for (std::size_t k = 0; k < scal.n_freqs(); ++k) {
    out += detail::fmt(scal.freqs()[k]);
    for (std::size_t i = 0; i < scal.n_times(); ++i) {
      out += ',';
      out += detail::fmt(scal.mag(k, i));
    }
    out += '\n';
  }
  atomic_write(path, out);
}

/// Re-read a scalogram; the cone of influence is recomputed from the
/// frequency axis through the scale map s = omega0/omega.
inline Scalogram read_scalogram(const std::filesystem::path& path,
                                const MorletParams& params = {}) {
  const auto lines = detail::read_lines(path);
  if (lines.empty()) throw IoError(path.string() + ": empty scalogram file");
  const auto head = detail::split_line(lines[0]);
  if (head.size() < 3 || head[0] != "t")
    throw IoError(path.string() + ": expected header 't,<times...>'");
  std::vector<double> times;
  for (std::size_t i = 1; i < head.size(); ++i)
    times.push_back(detail::parse_double(head[i], path.string()));
  const TimeGrid grid = detail::infer_grid(times, path.string());

  std::vector<double> freqs;
  std::vector<double> mags;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto tok = detail::split_line(lines[r]);
    if (tok.size() != times.size() + 1)
      throw IoError(path.string() + ": row " + std::to_string(r) + " has " +
                    std::to_string(tok.size()) + " columns, expected " +
                    std::to_string(times.size() + 1));
    freqs.push_back(detail::parse_double(tok[0], path.string()));
    for (std::size_t i = 1; i < tok.size(); ++i)
      mags.push_back(detail::parse_double(tok[i], path.string()));
  }
  if (freqs.empty()) throw IoError(path.string() + ": no frequency rows");
  // frequencies are written descending, so the derived scales ascend and
  // index the same rows the COI expects
  std::vector<double> scales(freqs.size());
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    if (!(freqs[k] > 0.0))
      throw IoError(path.string() + ": non-positive frequency row " +
                    detail::fmt(freqs[k]));
    scales[k] = params.omega0 / freqs[k];
  }
  return Scalogram(grid, std::move(freqs), std::move(mags),
                   tfridge::detail::compute_coi(scales, grid));
}

/// `t,omega,mag` rows, one per ridge entry, in time order then bin order.
inline void write_ridge(const std::filesystem::path& path, const RidgeTrack& track) {
  std::string out = "t,omega,mag\n";
  for (std::size_t i = 0; i < track.grid().size(); ++i) {
    const double t = track.grid().time(i);
    for (const RidgePoint& p : track.columns()[i]) {
      out += detail::fmt(t);
      out += ',';
      out += detail::fmt(p.freq);
      out += ',';
      out += detail::fmt(p.mag);
      out += '\n';
    }
  }
  atomic_write(path, out);
}

/// Rebuild a RidgeTrack from ridge.csv on a known grid. The peak of each
/// column is the highest-magnitude entry (first in file order on ties),
/// which reproduces the columnwise maximum the writer emitted.
inline RidgeTrack read_ridge(const std::filesystem::path& path,
                             const TimeGrid& grid) {
  const auto lines = detail::read_lines(path);
  if (lines.empty() || detail::split_line(lines[0]) !=
                           std::vector<std::string>{"t", "omega", "mag"})
    throw IoError(path.string() + ": expected header 't,omega,mag'");
  std::vector<std::vector<RidgePoint>> columns(grid.size());
  std::vector<std::optional<RidgePoint>> peak(grid.size());
  const double tol = 0.5 * grid.dt();
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto tok = detail::split_line(lines[r]);
    if (tok.size() != 3)
      throw IoError(path.string() + ": row " + std::to_string(r) + " has " +
                    std::to_string(tok.size()) + " columns, expected 3");
    const double t = detail::parse_double(tok[0], path.string());
    const double idx_f = (t - grid.t0()) / grid.dt();
    const auto idx = static_cast<std::ptrdiff_t>(idx_f + 0.5);
    if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(grid.size()) ||
        std::abs(t - grid.time(static_cast<std::size_t>(idx))) > tol)
      throw IoError(path.string() + ": time " + tok[0] + " not on the grid");
    const auto i = static_cast<std::size_t>(idx);
    RidgePoint p{detail::parse_double(tok[1], path.string()),
                 detail::parse_double(tok[2], path.string())};
    columns[i].push_back(p);
    if (!peak[i] || p.mag > peak[i]->mag) peak[i] = p;
  }
  return RidgeTrack(grid, std::move(columns), std::move(peak));
}

}  // namespace tfridge::io
