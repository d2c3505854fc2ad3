#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tfridge/errors.hpp"

namespace tfridge {

/// Uniform time grid: t(i) = t0 + i*dt for i in [0, n).
///
/// All analysis in this library assumes uniform sampling; non-uniform input
/// is rejected at construction time, never silently resampled.
class TimeGrid {
 public:
  TimeGrid(double t0, double dt, std::size_t n) : t0_(t0), dt_(dt), n_(n) {
    if (!std::isfinite(dt))
      throw NonFiniteValue("TimeGrid: dt is not finite");
    if (!(dt > 0.0))
      throw NonPositiveStep("TimeGrid: dt must be positive, got " +
                            std::to_string(dt));
    if (n < 2)
      throw TooFewSamples("TimeGrid: need at least 2 samples, got " +
                          std::to_string(n));
    if (!std::isfinite(t0))
      throw NonFiniteValue("TimeGrid: t0 is not finite");
  }

  double t0() const { return t0_; }
  double dt() const { return dt_; }
  std::size_t size() const { return n_; }

  double time(std::size_t i) const { return t0_ + static_cast<double>(i) * dt_; }
  double t_end() const { return time(n_ - 1); }
  double duration() const { return static_cast<double>(n_ - 1) * dt_; }

  bool operator==(const TimeGrid& o) const {
    return t0_ == o.t0_ && dt_ == o.dt_ && n_ == o.n_;
  }

 private:
  double t0_;
  double dt_;
  std::size_t n_;
};

namespace detail {

template <typename T>
inline bool finite_value(const T& v) {
  return std::isfinite(v);
}

template <typename T>
inline bool finite_value(const std::complex<T>& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

template <typename T>
inline void check_series(const TimeGrid& grid, const std::vector<T>& values,
                         const char* what) {
  if (values.size() != grid.size())
    throw DimensionMismatch(std::string(what) + ": values length " +
                            std::to_string(values.size()) +
                            " does not match grid size " +
                            std::to_string(grid.size()));
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!finite_value(values[i]))
      throw NonFiniteValue(std::string(what) + ": non-finite value at index " +
                           std::to_string(i));
}

}  // namespace detail

/// Uniformly sampled real signal. Immutable after construction.
class TimeSeries {
 public:
  TimeSeries(TimeGrid grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    detail::check_series(grid_, values_, "TimeSeries");
  }

  const TimeGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double value(std::size_t i) const { return values_[i]; }
  double time(std::size_t i) const { return grid_.time(i); }

 private:
  TimeGrid grid_;
  std::vector<double> values_;
};

/// Uniformly sampled complex signal (wavelet atoms, analytic signals).
class ComplexSeries {
 public:
  ComplexSeries(TimeGrid grid, std::vector<std::complex<double>> values)
      : grid_(grid), values_(std::move(values)) {
    detail::check_series(grid_, values_, "ComplexSeries");
  }

  const TimeGrid& grid() const { return grid_; }
  const std::vector<std::complex<double>>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  std::complex<double> value(std::size_t i) const { return values_[i]; }
  double time(std::size_t i) const { return grid_.time(i); }

 private:
  TimeGrid grid_;
  std::vector<std::complex<double>> values_;
};

/// Validating constructor for a TimeSeries from raw samples.
inline TimeSeries make_time_series(double t0, double dt,
                                   std::vector<double> values) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw NonPositiveStep("make_time_series: dt must be positive, got " +
                          std::to_string(dt));
  if (values.size() < 2)
    throw TooFewSamples("make_time_series: need at least 2 samples, got " +
                        std::to_string(values.size()));
  TimeGrid grid(t0, dt, values.size());
  return TimeSeries(grid, std::move(values));
}

}  // namespace tfridge
