#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "tfridge/core.hpp"
#include "tfridge/errors.hpp"
#include "tfridge/fft.hpp"

namespace tfridge {

/// One-sided magnitude spectrum on an angular-frequency axis [0, Nyquist].
struct Spectrum {
  std::vector<double> freqs;  ///< angular frequencies, strictly increasing
  std::vector<double> mags;   ///< |F(omega)|, same length
};

enum class Window { none, hann };

/// One-sided DFT magnitude of a real signal.
///
/// The signal is zero-padded to the next power of two >= zero_pad_factor * n,
/// so peak positions are readable to a fraction of the natural bin width.
/// Magnitudes carry the dt factor (Riemann approximation of the continuous
/// transform), making them grid-resolution independent.
inline Spectrum dft_magnitude(const TimeSeries& signal, int zero_pad_factor = 4,
                              Window window = Window::none) {
  if (zero_pad_factor < 1)
    throw InvalidParameter("dft_magnitude: zero_pad_factor must be >= 1, got " +
                           std::to_string(zero_pad_factor));
  const std::size_t n = signal.size();
  const double dt = signal.grid().dt();
  const std::size_t padded =
      fft::next_pow2(n * static_cast<std::size_t>(zero_pad_factor));

  std::vector<std::complex<double>> buf(padded, {0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    double w = 1.0;
    if (window == Window::hann) {
      w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                               static_cast<double>(n - 1));
    }
    buf[i] = signal.value(i) * w;
  }
  fft::forward(buf);

  const std::size_t n_bins = padded / 2 + 1;
  Spectrum out;
  out.freqs.resize(n_bins);
  out.mags.resize(n_bins);
  const double domega =
      2.0 * std::numbers::pi / (static_cast<double>(padded) * dt);
  for (std::size_t m = 0; m < n_bins; ++m) {
    out.freqs[m] = domega * static_cast<double>(m);
    out.mags[m] = std::abs(buf[m]) * dt;
  }
  return out;
}

/// Up to k largest local maxima of the spectrum, separated by at least
/// min_separation, ordered by magnitude descending (ties: lower frequency
/// first). Returns fewer than k when the spectrum has fewer usable peaks.
inline std::vector<std::pair<double, double>> top_peaks(const Spectrum& spectrum,
                                                        std::size_t k,
                                                        double min_separation) {
  if (k < 1) throw InvalidParameter("top_peaks: k must be >= 1");
  const auto& m = spectrum.mags;
  const std::size_t n = m.size();
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i] <= 0.0) continue;
    const bool left_ok = (i == 0) || m[i] > m[i - 1];
    const bool right_ok = (i + 1 == n) || m[i] >= m[i + 1];
    if (left_ok && right_ok) candidates.push_back(i);
  }
  std::sort(candidates.begin(), candidates.end(),
            [&](std::size_t a, std::size_t b) {
              if (m[a] != m[b]) return m[a] > m[b];
              return spectrum.freqs[a] < spectrum.freqs[b];
            });

  std::vector<std::pair<double, double>> out;
  for (std::size_t idx : candidates) {
    if (out.size() == k) break;
    const double f = spectrum.freqs[idx];
    bool clear = true;
    for (const auto& [fa, _] : out)
      if (std::abs(fa - f) < min_separation) { clear = false; break; }
    if (clear) out.emplace_back(f, m[idx]);
  }
  return out;
}

}  // namespace tfridge
