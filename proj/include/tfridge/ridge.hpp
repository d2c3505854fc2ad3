#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tfridge/core.hpp"
#include "tfridge/errors.hpp"
#include "tfridge/wavelet.hpp"

namespace tfridge {

/// One ridge entry: a frequency-axis bin value and its magnitude.
struct RidgePoint {
  double freq = 0.0;
  double mag = 0.0;
};

/// Per-time ridge sets plus the single columnwise-maximum track.
///
/// columns()[i] lists the dominant local maxima at time i in bin order
/// (descending frequency). peak()[i] is the global columnwise maximum, or
/// absent where the column sits below the noise floor (or entirely outside
/// the cone of influence when it was respected).
class RidgeTrack {
 public:
  RidgeTrack(TimeGrid grid, std::vector<std::vector<RidgePoint>> columns,
             std::vector<std::optional<RidgePoint>> peak)
      : grid_(grid), columns_(std::move(columns)), peak_(std::move(peak)) {
    if (columns_.size() != grid_.size() || peak_.size() != grid_.size())
      throw DimensionMismatch("RidgeTrack: column count does not match grid");
  }

  const TimeGrid& grid() const { return grid_; }
  const std::vector<std::vector<RidgePoint>>& columns() const { return columns_; }
  const std::vector<std::optional<RidgePoint>>& peak() const { return peak_; }

 private:
  TimeGrid grid_;
  std::vector<std::vector<RidgePoint>> columns_;
  std::vector<std::optional<RidgePoint>> peak_;
};

/// Result of fitting a peak track to omega_inf + lambda_est * exp(-rate_est*t).
struct RelaxationFit {
  double omega_inf = 0.0;
  double lambda_est = 0.0;
  double rate_est = 0.0;
  double rms_residual = 0.0;
};

namespace detail {

// Columns whose maximum falls below this fraction of the scalogram-wide
// maximum carry no ridge information, only numerical dust. The floor must
// stay far below physically weak but real branches (which can sit three to
// four decades under the global maximum) while staying far above FFT
// roundoff (~1e-13 relative).
inline constexpr double ridge_noise_floor = 1e-6;

}  // namespace detail

/// Multi-ridge extraction: per time column, the local maxima along the
/// frequency axis whose magnitude is within `threshold` of the column
/// maximum (mag >= (1-threshold) * column max). The column maximum itself is
/// always included. Endpoint bins count as local maxima (one-sided test).
inline RidgeTrack dominant_frequencies(const Scalogram& scal, double threshold = 0.2,
                                       bool respect_coi = true) {
  if (!(threshold > 0.0) || !(threshold <= 1.0))
    throw BadThreshold("dominant_frequencies: threshold must be in (0, 1], got " +
                       std::to_string(threshold));
  const std::size_t n_times = scal.n_times();
  const std::size_t n_freqs = scal.n_freqs();

  double global_max = 0.0;
  for (double m : scal.mags()) global_max = std::max(global_max, m);
  const double floor = detail::ridge_noise_floor * global_max;

  std::vector<std::vector<RidgePoint>> columns(n_times);
  std::vector<std::optional<RidgePoint>> peak(n_times);

  for (std::size_t i = 0; i < n_times; ++i) {
    // trustworthy band is bins [0, band_end); frequencies descend with index
    std::size_t band_end = n_freqs;
    if (respect_coi)
      band_end = static_cast<std::size_t>(std::max(scal.coi(i) + 1, 0));
    if (band_end == 0) continue;

    double col_max = -1.0;
    std::size_t argmax = 0;
    for (std::size_t k = 0; k < band_end; ++k) {
      const double m = scal.mag(k, i);
      if (m > col_max) {
        col_max = m;
        argmax = k;
      }
    }
    if (col_max <= floor || col_max == 0.0) continue;

    peak[i] = RidgePoint{scal.freqs()[argmax], col_max};

    const double cut = (1.0 - threshold) * col_max;
    auto& col = columns[i];
    for (std::size_t k = 0; k < band_end; ++k) {
      const double m = scal.mag(k, i);
      const bool left_ok = (k == 0) || m > scal.mag(k - 1, i);
      const bool right_ok = (k + 1 == band_end) || m >= scal.mag(k + 1, i);
      if ((left_ok && right_ok && m >= cut) || k == argmax)
        col.push_back({scal.freqs()[k], m});
    }
  }

  return RidgeTrack(scal.grid(), std::move(columns), std::move(peak));
}

/// Magnitude row at the frequency bin nearest omega_center, as a TimeSeries.
inline TimeSeries band_amplitude(const Scalogram& scal, double omega_center) {
  const auto& freqs = scal.freqs();
  if (freqs.empty() || omega_center > freqs.front() * (1.0 + 1e-12) ||
      omega_center < freqs.back() * (1.0 - 1e-12))
    throw FrequencyOutOfBand("band_amplitude: omega " + std::to_string(omega_center) +
                             " outside scalogram band [" +
                             std::to_string(freqs.empty() ? 0.0 : freqs.back()) + ", " +
                             std::to_string(freqs.empty() ? 0.0 : freqs.front()) + "]");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    const double d = std::abs(freqs[k] - omega_center);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  std::vector<double> values(scal.n_times());
  for (std::size_t i = 0; i < scal.n_times(); ++i) values[i] = scal.mag(best, i);
  return TimeSeries(scal.grid(), std::move(values));
}

/// First and last times at which the peak track is strictly inside the cone
/// of influence (its bin is above the cone-boundary bin). Columns whose
/// maximum sits on the cone boundary are truncation artifacts: the true
/// column maximum lies outside the trustworthy band there.
inline std::optional<std::pair<double, double>> track_extent(
    const Scalogram& scal, const RidgeTrack& track) {
  std::optional<double> first, last;
  for (std::size_t i = 0; i < track.grid().size(); ++i) {
    const auto& p = track.peak()[i];
    if (!p) continue;
    const int c = scal.coi(i);
    if (c < 0) continue;
    // boundary bin has the lowest trustworthy frequency; interior peaks sit
    // strictly above it
    if (!(p->freq > scal.freqs()[static_cast<std::size_t>(c)])) continue;
    if (!first) first = track.grid().time(i);
    last = track.grid().time(i);
  }
  if (!first) return std::nullopt;
  return std::make_pair(*first, *last);
}

namespace detail {

// Linear least squares for y ~ c0 + c1*exp(-r*t) at fixed r. Returns false
// when the normal equations are degenerate (basis collinear, e.g. r*t >> 1
// everywhere); the caller then pins the amplitude to zero.
inline bool solve_amplitudes(const std::vector<double>& t, const std::vector<double>& y,
                             double r, double& c0, double& c1, double& sse) {
  const std::size_t n = t.size();
  double sb = 0.0, sbb = 0.0, sy = 0.0, sby = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double b = std::exp(-r * t[i]);
    sb += b;
    sbb += b * b;
    sy += y[i];
    sby += b * y[i];
  }
  const double nn = static_cast<double>(n);
  const double det = nn * sbb - sb * sb;
  if (!(det > 1e-12 * nn * std::max(sbb, 1e-300))) return false;
  c0 = (sbb * sy - sb * sby) / det;
  c1 = (nn * sby - sb * sy) / det;
  sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (c0 + c1 * std::exp(-r * t[i]));
    sse += e * e;
  }
  return std::isfinite(sse);
}

}  // namespace detail

/// Fit the peak track over [t_start, t_end] to omega_inf + A*exp(-r*t).
///
/// Deterministic derivative-free scheme: 64-point log-spaced grid search over
/// the rate with closed-form amplitudes at each candidate, then golden-section
/// refinement of the rate around the grid winner.
inline RelaxationFit fit_relaxation(const RidgeTrack& track, double t_start,
                                    double t_end) {
  if (!(t_end > t_start))
    throw WindowTooShort("fit_relaxation: need t_start < t_end, got [" +
                         std::to_string(t_start) + ", " + std::to_string(t_end) + "]");
  std::vector<double> t, y;
  for (std::size_t i = 0; i < track.grid().size(); ++i) {
    const double ti = track.grid().time(i);
    if (ti < t_start - 1e-12 || ti > t_end + 1e-12) continue;
    if (!track.peak()[i]) continue;
    t.push_back(ti);
    y.push_back(track.peak()[i]->freq);
  }
  if (t.size() < 16)
    throw WindowTooShort("fit_relaxation: only " + std::to_string(t.size()) +
                         " track points in window, need >= 16");

  const double w = t_end - t_start;
  const double r_lo = 1.0 / w;
  const double r_hi = 1000.0 / w;
  constexpr int n_grid = 64;

  std::vector<double> rates(n_grid), errs(n_grid);
  bool any_ok = false;
  double mean_y = 0.0;
  for (double v : y) mean_y += v;
  mean_y /= static_cast<double>(y.size());
  double sse_const = 0.0;
  for (double v : y) sse_const += (v - mean_y) * (v - mean_y);

  for (int k = 0; k < n_grid; ++k) {
    const double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(k) / (n_grid - 1));
    rates[k] = r;
    double c0, c1, sse;
    if (detail::solve_amplitudes(t, y, r, c0, c1, sse)) {
      errs[k] = sse;
      any_ok = true;
    } else {
      errs[k] = sse_const;  // degenerate basis: constant model
    }
  }
  if (!any_ok && !std::isfinite(sse_const))
    throw FitDiverged("fit_relaxation: least-squares solve failed at every rate");

  int best = 0;
  for (int k = 1; k < n_grid; ++k)
    if (errs[k] < errs[best]) best = k;

  // golden-section refinement on the bracketing grid interval
  double a = rates[std::max(best - 1, 0)];
  double b = rates[std::min(best + 1, n_grid - 1)];
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  auto eval = [&](double r) {
    double c0, c1, sse;
    if (!detail::solve_amplitudes(t, y, r, c0, c1, sse)) return sse_const;
    return sse;
  };
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = eval(x1), f2 = eval(x2);
  for (int it = 0; it < 60 && (b - a) > 1e-12 * b; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = eval(x2);
    }
  }
  const double r_best = 0.5 * (a + b);

  RelaxationFit fit;
  double c0, c1, sse;
  if (detail::solve_amplitudes(t, y, r_best, c0, c1, sse) && sse <= errs[best] + 1e-30) {
    fit.omega_inf = c0;
    fit.lambda_est = c1;
    fit.rate_est = r_best;
    fit.rms_residual = std::sqrt(sse / static_cast<double>(t.size()));
  } else {
    // grid winner stands when refinement landed on a degenerate rate
    if (!detail::solve_amplitudes(t, y, rates[best], c0, c1, sse)) {
      fit.omega_inf = mean_y;
      fit.lambda_est = 0.0;
      fit.rate_est = rates[best];
      fit.rms_residual = std::sqrt(sse_const / static_cast<double>(t.size()));
    } else {
      fit.omega_inf = c0;
      fit.lambda_est = c1;
      fit.rate_est = rates[best];
      fit.rms_residual = std::sqrt(sse / static_cast<double>(t.size()));
    }
  }
  if (!std::isfinite(fit.omega_inf) || !std::isfinite(fit.lambda_est) ||
      !std::isfinite(fit.rms_residual))
    throw FitDiverged("fit_relaxation: non-finite fit result");
  return fit;
}

}  // namespace tfridge
