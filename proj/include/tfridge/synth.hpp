#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "tfridge/core.hpp"
#include "tfridge/errors.hpp"

namespace tfridge {

/// One Gaussian-windowed sinusoid: sin(omega*t) * exp(-((t-mu)/sigma)^2 / 2).
struct ToyComponent {
  double omega;  ///< angular frequency, > 0
  double mu;     ///< envelope center time
  double sigma;  ///< envelope width, > 0
};

/// Multi-component toy signal: sum of Gaussian-windowed sinusoids.
struct ToyParams {
  std::vector<ToyComponent> components;
};

/// Damped oscillation with an exponentially relaxing phase:
///   exp(-g_re*t) * sin(omega_eg*t + (lambda/omega_d)*(1 - exp(-omega_d*t)))
/// The instantaneous angular frequency sweeps from omega_eg + lambda down to
/// omega_eg on the relaxation timescale 1/omega_d.
struct LineshapeParams {
  double omega_eg;  ///< asymptotic (relaxed) angular frequency, > 0
  double lambda;    ///< total frequency sweep (Stokes shift), >= 0
  double omega_d;   ///< relaxation rate, > 0
  double g_re = 0.0;  ///< amplitude damping rate, >= 0
};

namespace detail {

inline void validate(const ToyParams& p) {
  if (p.components.empty())
    throw InvalidParameter("ToyParams: components must be nonempty");
  for (std::size_t i = 0; i < p.components.size(); ++i) {
    const auto& c = p.components[i];
    if (!(c.sigma > 0.0))
      throw InvalidParameter("ToyComponent[" + std::to_string(i) +
                             "]: sigma must be > 0, got " + std::to_string(c.sigma));
    if (!(c.omega > 0.0))
      throw InvalidParameter("ToyComponent[" + std::to_string(i) +
                             "]: omega must be > 0, got " + std::to_string(c.omega));
  }
}

inline void validate(const LineshapeParams& p) {
  if (!(p.omega_d > 0.0))
    throw InvalidParameter("LineshapeParams: omega_d must be > 0, got " +
                           std::to_string(p.omega_d));
  if (!(p.g_re >= 0.0))
    throw InvalidParameter("LineshapeParams: g_re must be >= 0, got " +
                           std::to_string(p.g_re));
  if (!(p.omega_eg > 0.0))
    throw InvalidParameter("LineshapeParams: omega_eg must be > 0, got " +
                           std::to_string(p.omega_eg));
  if (!(p.lambda >= 0.0))
    throw InvalidParameter("LineshapeParams: lambda must be >= 0, got " +
                           std::to_string(p.lambda));
}

}  // namespace detail

inline TimeSeries gen_toy_signal(const ToyParams& params, const TimeGrid& grid) {
  detail::validate(params);
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.time(i);
    double v = 0.0;
    for (const auto& c : params.components) {
      const double x = (t - c.mu) / c.sigma;
      v += std::sin(c.omega * t) * std::exp(-0.5 * x * x);
    }
    values[i] = v;
  }
  return TimeSeries(grid, std::move(values));
}

inline TimeSeries gen_lineshape_signal(const LineshapeParams& params,
                                       const TimeGrid& grid) {
  detail::validate(params);
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.time(i);
    const double phase =
        params.omega_eg * t +
        (params.lambda / params.omega_d) * (1.0 - std::exp(-params.omega_d * t));
    values[i] = std::exp(-params.g_re * t) * std::sin(phase);
  }
  return TimeSeries(grid, std::move(values));
}

/// Analytic instantaneous angular frequency of the lineshape signal:
/// d/dt [phase] = omega_eg + lambda * exp(-omega_d * t).
inline double lineshape_instant_freq(const LineshapeParams& params, double t) {
  detail::validate(params);
  return params.omega_eg + params.lambda * std::exp(-params.omega_d * t);
}

}  // namespace tfridge
