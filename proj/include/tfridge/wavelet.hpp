#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "tfridge/core.hpp"
#include "tfridge/errors.hpp"
#include "tfridge/fft.hpp"

namespace tfridge {

/// Analytic Morlet mother wavelet psi(x) = pi^(-1/4) exp(i*omega0*x) exp(-x^2/2).
///
/// omega0 >= 5 keeps the admissibility defect (nonzero mean) below 1e-5
/// without a correction term, and gives the scale-to-frequency map
/// omega = omega0 / s.
struct MorletParams {
  double omega0 = 6.0;
};

namespace detail {

inline void validate(const MorletParams& p) {
  if (!(p.omega0 >= 5.0))
    throw InvalidParameter("MorletParams: omega0 must be >= 5, got " +
                           std::to_string(p.omega0));
}

inline double morlet_norm() { return std::pow(std::numbers::pi, -0.25); }

// Smallest admissible scale for a grid step: ~2 samples per atom oscillation.
inline double min_scale(double dt, double omega0) {
  return 2.0 * std::numbers::pi * dt / omega0;
}

// The atom's Gaussian support is taken as 5 sigma on each side.
inline constexpr double atom_support_sigmas = 5.0;

}  // namespace detail

/// Log-spaced scale bank with the derived angular-frequency axis
/// omega_k = omega0 / s_k. Scales ascend, frequencies descend.
class ScaleBank {
 public:
  ScaleBank(std::vector<double> scales, const MorletParams& params,
            const TimeGrid& grid)
      : scales_(std::move(scales)) {
    detail::validate(params);
    if (scales_.empty()) throw InvalidParameter("ScaleBank: empty scale set");
    for (std::size_t k = 0; k < scales_.size(); ++k) {
      if (!(scales_[k] > 0.0))
        throw InvalidParameter("ScaleBank: scale[" + std::to_string(k) +
                               "] must be > 0");
      if (k > 0 && !(scales_[k] > scales_[k - 1]))
        throw InvalidParameter("ScaleBank: scales must be strictly increasing");
    }
    const double s_min_ok = detail::min_scale(grid.dt(), params.omega0);
    if (scales_.front() < s_min_ok * (1.0 - 1e-12))
      throw ScaleTooSmall("ScaleBank: scale " + std::to_string(scales_.front()) +
                          " below minimum " + std::to_string(s_min_ok) +
                          " for dt=" + std::to_string(grid.dt()));
    const double support = 2.0 * detail::atom_support_sigmas * scales_.back();
    if (support > 4.0 * grid.duration())
      throw BandOutOfRange("ScaleBank: longest atom support " +
                           std::to_string(support) + " exceeds 4x signal duration " +
                           std::to_string(4.0 * grid.duration()));
    freqs_.resize(scales_.size());
    for (std::size_t k = 0; k < scales_.size(); ++k)
      freqs_[k] = params.omega0 / scales_[k];
  }

  const std::vector<double>& scales() const { return scales_; }
  const std::vector<double>& freqs() const { return freqs_; }
  std::size_t size() const { return scales_.size(); }

 private:
  std::vector<double> scales_;
  std::vector<double> freqs_;  // omega0 / s, strictly decreasing
};

/// Build a bank covering [f_min, f_max] (angular) with n_voices bins per
/// octave, descending from f_max. f_max must not exceed the Nyquist rate.
inline ScaleBank make_scale_bank(double f_min, double f_max, int n_voices,
                                 const TimeGrid& grid,
                                 const MorletParams& params = {}) {
  detail::validate(params);
  if (n_voices < 1)
    throw TooFewVoices("make_scale_bank: n_voices must be >= 1, got " +
                       std::to_string(n_voices));
  const double nyquist = std::numbers::pi / grid.dt();
  if (!(f_min > 0.0) || !(f_min < f_max))
    throw BandOutOfRange("make_scale_bank: need 0 < f_min < f_max, got [" +
                         std::to_string(f_min) + ", " + std::to_string(f_max) + "]");
  if (f_max > nyquist * (1.0 + 1e-12))
    throw BandOutOfRange("make_scale_bank: f_max " + std::to_string(f_max) +
                         " exceeds Nyquist " + std::to_string(nyquist));

  std::vector<double> freqs;
  const double step = std::pow(2.0, 1.0 / static_cast<double>(n_voices));
  for (double f = f_max; f >= f_min * (1.0 - 1e-12); f /= step)
    freqs.push_back(f);

  std::vector<double> scales(freqs.size());
  for (std::size_t k = 0; k < freqs.size(); ++k)
    scales[k] = params.omega0 / freqs[k];
  return ScaleBank(std::move(scales), params, grid);
}

/// |CWT| magnitudes over (frequency, time), with axis metadata and the
/// per-time cone-of-influence boundary.
class Scalogram {
 public:
  Scalogram(TimeGrid grid, std::vector<double> freqs, std::vector<double> mags,
            std::vector<int> coi,
            std::vector<std::complex<double>> coeffs = {})
      : grid_(grid),
        freqs_(std::move(freqs)),
        mags_(std::move(mags)),
        coi_(std::move(coi)),
        coeffs_(std::move(coeffs)) {
    if (mags_.size() != freqs_.size() * grid_.size())
      throw DimensionMismatch("Scalogram: mags size does not match axes");
    if (coi_.size() != grid_.size())
      throw DimensionMismatch("Scalogram: coi size does not match grid");
    if (!coeffs_.empty() && coeffs_.size() != mags_.size())
      throw DimensionMismatch("Scalogram: coeffs size does not match mags");
    for (double m : mags_)
      if (!(m >= 0.0))
        throw InvariantViolation("Scalogram: negative or non-finite magnitude");
  }

  const TimeGrid& grid() const { return grid_; }
  const std::vector<double>& freqs() const { return freqs_; }
  std::size_t n_freqs() const { return freqs_.size(); }
  std::size_t n_times() const { return grid_.size(); }

  double mag(std::size_t k, std::size_t i) const {
    return mags_[k * grid_.size() + i];
  }
  const std::vector<double>& mags() const { return mags_; }

  /// Largest trustworthy frequency index at time i (frequencies descend with
  /// index, so indices 0..coi(i) are inside the cone). -1: none trustworthy.
  int coi(std::size_t i) const { return coi_[i]; }
  const std::vector<int>& coi() const { return coi_; }
  bool in_coi(std::size_t k, std::size_t i) const {
    return static_cast<int>(k) <= coi_[i];
  }

  bool has_coeffs() const { return !coeffs_.empty(); }
  std::complex<double> coeff(std::size_t k, std::size_t i) const {
    return coeffs_[k * grid_.size() + i];
  }

 private:
  TimeGrid grid_;
  std::vector<double> freqs_;
  std::vector<double> mags_;  // row-major [n_freqs x n_times]
  std::vector<int> coi_;
  std::vector<std::complex<double>> coeffs_;  // empty unless requested
};

struct CwtOptions {
  bool keep_complex = false;
  int max_threads = 0;  ///< 0: hardware concurrency, capped by TFRIDGE_THREADS
};

/// Samples of the translated/dilated atom s^(-1/2) psi((t-u)/s) on the grid.
///
/// In strict mode the atom's 5-sigma support must lie inside the grid.
inline ComplexSeries morlet_atom(double u, double s, const TimeGrid& grid,
                                 const MorletParams& params = {},
                                 bool strict = false) {
  detail::validate(params);
  if (!(s > 0.0) || s < detail::min_scale(grid.dt(), params.omega0) * (1.0 - 1e-12))
    throw ScaleTooSmall("morlet_atom: scale " + std::to_string(s) +
                        " below minimum " +
                        std::to_string(detail::min_scale(grid.dt(), params.omega0)));
  if (strict) {
    const double half = detail::atom_support_sigmas * s;
    if (u - half < grid.t0() || u + half > grid.t_end())
      throw AtomExceedsGrid("morlet_atom: support [" + std::to_string(u - half) +
                            ", " + std::to_string(u + half) +
                            "] not contained in grid [" + std::to_string(grid.t0()) +
                            ", " + std::to_string(grid.t_end()) + "]");
  }
  const double amp = detail::morlet_norm() / std::sqrt(s);
  std::vector<std::complex<double>> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = (grid.time(i) - u) / s;
    const double env = amp * std::exp(-0.5 * x * x);
    values[i] = {env * std::cos(params.omega0 * x), env * std::sin(params.omega0 * x)};
  }
  return ComplexSeries(grid, std::move(values));
}

namespace detail {

inline int env_thread_cap() {
  if (const char* v = std::getenv("TFRIDGE_THREADS")) {
    const long n = std::strtol(v, nullptr, 10);
    if (n >= 1) return static_cast<int>(n);
  }
  return 0;  // no cap
}

inline unsigned cwt_worker_count(std::size_t n_scales, int max_threads) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  unsigned cap = max_threads > 0 ? static_cast<unsigned>(max_threads) : hw;
  if (max_threads <= 0) {
    const int env_cap = env_thread_cap();
    if (env_cap > 0) cap = std::min<unsigned>(cap, static_cast<unsigned>(env_cap));
  }
  return std::max<unsigned>(1u, std::min<unsigned>(cap, static_cast<unsigned>(n_scales)));
}

// Cone of influence: scale s is trustworthy at time i when the e-folding
// half-width sqrt(2)*s fits inside the distance to the nearer grid boundary.
// Entry i is the largest index into the ascending scale array still
// trustworthy at time i, or -1 when none is.
inline std::vector<int> compute_coi(const std::vector<double>& scales,
                                    const TimeGrid& grid) {
  const std::size_t n = grid.size();
  std::vector<int> coi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = grid.dt() * static_cast<double>(std::min(i, n - 1 - i));
    const double s_ok = d / std::numbers::sqrt2;
    const auto it = std::upper_bound(scales.begin(), scales.end(), s_ok);
    coi[i] = static_cast<int>(it - scales.begin()) - 1;
  }
  return coi;
}

// Time-domain atom kernel on the padded circular buffer: entry m holds
// dt * s^(-1/2) psi(tau/s) at tau = m*dt (m < p/2) or (m-p)*dt (m >= p/2).
// Convolving the padded signal with this kernel reproduces the Riemann sum
// of the transform integral exactly, so the FFT path matches direct
// quadrature to roundoff.
inline void fill_atom_kernel(std::vector<std::complex<double>>& g, std::size_t p,
                             double s, double dt, double omega0) {
  g.assign(p, {0.0, 0.0});
  const double amp = dt * morlet_norm() / std::sqrt(s);
  for (std::size_t m = 0; m < p; ++m) {
    const double tau = (m < p / 2 ? static_cast<double>(m)
                                  : static_cast<double>(m) - static_cast<double>(p)) * dt;
    const double x = tau / s;
    const double env = amp * std::exp(-0.5 * x * x);
    g[m] = {env * std::cos(omega0 * x), env * std::sin(omega0 * x)};
  }
}

}  // namespace detail

/// Continuous wavelet transform of a real signal over a scale bank.
///
/// One FFT-convolution per scale against the exactly sampled atom kernel;
/// each scale's output row is written by exactly one worker, so the result
/// is bitwise independent of the worker count.
inline Scalogram cwt(const TimeSeries& signal, const ScaleBank& bank,
                     const MorletParams& params = {},
                     const CwtOptions& options = {}) {
  detail::validate(params);
  const std::size_t n = signal.size();
  const double dt = signal.grid().dt();
  const std::size_t p = fft::next_pow2(2 * n);
  const std::size_t n_scales = bank.size();

  // forward FFT of the zero-padded signal, shared read-only by all workers
  std::vector<std::complex<double>> sig_fft(p, {0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) sig_fft[i] = signal.value(i);
  fft::forward(sig_fft);

  std::vector<double> mags(n_scales * n);
  std::vector<std::complex<double>> coeffs;
  if (options.keep_complex) coeffs.resize(n_scales * n);

  auto run_scales = [&](std::size_t k_begin, std::size_t k_end) {
    std::vector<std::complex<double>> work(p);
    for (std::size_t k = k_begin; k < k_end; ++k) {
      detail::fill_atom_kernel(work, p, bank.scales()[k], dt, params.omega0);
      fft::forward(work);
      for (std::size_t m = 0; m < p; ++m) work[m] *= sig_fft[m];
      fft::inverse(work);
      double* mrow = mags.data() + k * n;
      for (std::size_t i = 0; i < n; ++i) mrow[i] = std::abs(work[i]);
      if (options.keep_complex)
        std::copy(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(n),
                  coeffs.begin() + static_cast<std::ptrdiff_t>(k * n));
    }
  };

  const unsigned workers = detail::cwt_worker_count(n_scales, options.max_threads);
  if (workers <= 1) {
    run_scales(0, n_scales);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n_scales + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t b = std::min<std::size_t>(w * chunk, n_scales);
      const std::size_t e = std::min<std::size_t>(b + chunk, n_scales);
      if (b < e) pool.emplace_back(run_scales, b, e);
    }
    for (auto& th : pool) th.join();
  }

  return Scalogram(signal.grid(), bank.freqs(), std::move(mags),
                   detail::compute_coi(bank.scales(), signal.grid()),
                   std::move(coeffs));
}

}  // namespace tfridge
