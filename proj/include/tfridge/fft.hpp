#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "tfridge/errors.hpp"

namespace tfridge::fft {

/// Smallest power of two >= n (n >= 1).
inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace detail {

// Iterative radix-2 Cooley-Tukey. sign = -1 forward, +1 inverse (unscaled).
inline void transform_inplace(std::vector<std::complex<double>>& a, int sign) {
  const std::size_t n = a.size();
  if (!is_pow2(n))
    throw Error("fft: length must be a power of two, got " + std::to_string(n));
  if (n == 1) return;

  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang =
        static_cast<double>(sign) * 2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

}  // namespace detail

/// In-place forward DFT: X[k] = sum_j x[j] exp(-2*pi*i*j*k/N).
inline void forward(std::vector<std::complex<double>>& a) {
  detail::transform_inplace(a, -1);
}

/// In-place inverse DFT including the 1/N factor.
inline void inverse(std::vector<std::complex<double>>& a) {
  detail::transform_inplace(a, +1);
  const double inv_n = 1.0 / static_cast<double>(a.size());
  for (auto& v : a) v *= inv_n;
}

/// Angular frequency of DFT bin m for length n and sample step dt,
/// mapped to (-pi/dt, pi/dt].
inline double bin_angular_frequency(std::size_t m, std::size_t n, double dt) {
  const double two_pi = 2.0 * std::numbers::pi;
  if (m <= n / 2) return two_pi * static_cast<double>(m) / (static_cast<double>(n) * dt);
  return -two_pi * static_cast<double>(n - m) / (static_cast<double>(n) * dt);
}

}  // namespace tfridge::fft
