#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "tfridge/core.hpp"
#include "tfridge/errors.hpp"

namespace tfridge {

/// Vibronically coupled excitonic dimer in the single-excitation manifold,
/// energies in units of the exciton splitting parameter j.
struct DimerParams {
  double j = 1.0;       ///< exciton splitting parameter (sets the unit)
  double g = 0.0;       ///< exciton-vibration coupling
  double omega = 1.0;   ///< vibrational angular frequency
  double gamma = 0.0;   ///< pure-dephasing rate
  int n_max = 10;       ///< oscillator truncation level
  TimeGrid grid{0.0, 0.01, 2};
};

namespace detail {

inline void validate(const DimerParams& p) {
  if (!(p.j > 0.0))
    throw InvalidParameter("DimerParams: j must be > 0, got " + std::to_string(p.j));
  if (!(p.omega > 0.0))
    throw InvalidParameter("DimerParams: omega must be > 0, got " +
                           std::to_string(p.omega));
  if (!(p.gamma >= 0.0))
    throw InvalidParameter("DimerParams: gamma must be >= 0, got " +
                           std::to_string(p.gamma));
  if (p.n_max < 2)
    throw InvalidParameter("DimerParams: n_max must be >= 2, got " +
                           std::to_string(p.n_max));
}

}  // namespace detail

/// Validated density matrix on the ordered basis {|e1>,|e2>} x {|0>..|n_max>}.
///
/// Construction checks Hermiticity (1e-10), unit trace (1e-8), and numerical
/// positivity (smallest eigenvalue >= -1e-8).
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() < 2 ||
        entries_.rows() % 2 != 0)
      throw DimensionMismatch("DensityMatrix: need even square dimension >= 2");
    const double herm = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    if (!(herm <= 1e-10))
      throw InvariantViolation("DensityMatrix: Hermiticity violated by " +
                               std::to_string(herm));
    const std::complex<double> tr = entries_.trace();
    if (!(std::abs(tr - 1.0) <= 1e-8))
      throw InvariantViolation("DensityMatrix: trace deviates from 1 by " +
                               std::to_string(std::abs(tr - 1.0)));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(entries_,
                                                       Eigen::EigenvaluesOnly);
    min_eigenvalue_ = es.eigenvalues().minCoeff();
    if (!(min_eigenvalue_ >= -1e-8))
      throw InvariantViolation("DensityMatrix: negative eigenvalue " +
                               std::to_string(min_eigenvalue_));
  }

  Eigen::Index dim() const { return entries_.rows(); }
  const Eigen::MatrixXcd& entries() const { return entries_; }
  double min_eigenvalue() const { return min_eigenvalue_; }
  double purity() const { return entries_.squaredNorm(); }  // Tr rho^2, Hermitian

 private:
  Eigen::MatrixXcd entries_;
  double min_eigenvalue_ = 0.0;
};

/// Electronic coherence Re Tr{rho(t) |e1><e2| x 1} sampled on a grid.
class CoherenceTrace {
 public:
  CoherenceTrace(TimeGrid grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    detail::check_series(grid_, values_, "CoherenceTrace");
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (!(std::abs(values_[i]) <= 0.5 + 1e-8))
        throw InvariantViolation("CoherenceTrace: |value| " +
                                 std::to_string(std::abs(values_[i])) +
                                 " exceeds 1/2 at index " + std::to_string(i));
  }

  const TimeGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double value(std::size_t i) const { return values_[i]; }
  double time(std::size_t i) const { return grid_.time(i); }

  TimeSeries as_time_series() const { return TimeSeries(grid_, values_); }

 private:
  TimeGrid grid_;
  std::vector<double> values_;
};

/// H = j*sigma_z x 1 + g*sigma_x x (a + a^dag) + omega*(1 x a^dag a) on the
/// ordered basis {|e1>,|e2>} x {|0>..|n_max>}. Real symmetric by construction.
inline Eigen::MatrixXcd build_hamiltonian(const DimerParams& params) {
  detail::validate(params);
  const int nl = params.n_max + 1;
  const int dim = 2 * nl;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int e = 0; e < 2; ++e) {
    const double sz = (e == 0) ? 1.0 : -1.0;
    for (int n = 0; n < nl; ++n)
      h(e * nl + n, e * nl + n) = params.j * sz + params.omega * n;
  }
  // sigma_x x X couples the exciton blocks through the ladder elements sqrt(n+1)
  for (int n = 0; n + 1 < nl; ++n) {
    const double x = params.g * std::sqrt(static_cast<double>(n + 1));
    h(n, nl + n + 1) = x;
    h(n + 1, nl + n) = x;
    h(nl + n, n + 1) = x;
    h(nl + n + 1, n) = x;
  }
  return h;
}

/// rho(0) = |u><u| x |0><0| with |u> = (|e1> - |e2>)/sqrt(2): maximal initial
/// electronic coherence over the vibrational vacuum.
inline DensityMatrix initial_state(int n_max) {
  if (n_max < 2)
    throw InvalidParameter("initial_state: n_max must be >= 2, got " +
                           std::to_string(n_max));
  const int nl = n_max + 1;
  const int dim = 2 * nl;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi(0) = 1.0 / std::numbers::sqrt2;
  psi(nl) = -1.0 / std::numbers::sqrt2;
  return DensityMatrix(psi * psi.adjoint());
}

/// Re of the summed exciton off-diagonal block trace: the coherence between
/// |e1> and |e2> after tracing out the oscillator.
inline double coherence_amplitude(const DensityMatrix& rho) {
  const Eigen::Index nl = rho.dim() / 2;
  double re = 0.0;
  for (Eigen::Index n = 0; n < nl; ++n) re += rho.entries()(nl + n, n).real();
  return re;
}

/// Generator of the dephasing master equation applied to rho:
/// -i[H,rho] + gamma*(Z rho Z - rho) with Z = sigma_z x 1.
inline Eigen::MatrixXcd lindblad_rhs(const DensityMatrix& rho,
                                     const Eigen::MatrixXcd& h, double gamma) {
  if (h.rows() != rho.dim() || h.cols() != rho.dim())
    throw DimensionMismatch("lindblad_rhs: Hamiltonian dimension " +
                            std::to_string(h.rows()) + " vs state dimension " +
                            std::to_string(rho.dim()));
  const Eigen::Index nl = rho.dim() / 2;
  const Eigen::MatrixXcd tmp = h * rho.entries();
  Eigen::MatrixXcd out =
      std::complex<double>(0.0, -1.0) * (tmp - tmp.adjoint().eval());
  // Z rho Z - rho vanishes on the exciton-diagonal blocks and equals -2 rho
  // on the off-diagonal blocks
  out.topRightCorner(nl, nl) -= 2.0 * gamma * rho.entries().topRightCorner(nl, nl);
  out.bottomLeftCorner(nl, nl) -= 2.0 * gamma * rho.entries().bottomLeftCorner(nl, nl);
  return out;
}

struct EvolveOptions {
  bool check_truncation = true;  ///< re-run at n_max+4 and compare traces
  std::function<void(double, const DensityMatrix&)> observer{};
  std::size_t observer_stride = 1;  ///< call observer every k-th grid point
};

namespace detail {

// Real-split integrator state: rho = r + i*im with r symmetric and im
// antisymmetric. For a real symmetric H,
//   -i[H, rho] = (d + d^T) - i (c - c^T),  c = H r,  d = H im,
// two real matmuls per evaluation, and both symmetries are preserved
// exactly in floating point (so Hermiticity never drifts).
struct SplitState {
  Eigen::MatrixXd r;
  Eigen::MatrixXd im;
};

struct SplitRhs {
  const Eigen::MatrixXd& h;
  double gamma;
  Eigen::Index nl;

  void operator()(const SplitState& s, SplitState& out) const {
    const Eigen::MatrixXd c = h * s.r;
    const Eigen::MatrixXd d = h * s.im;
    out.r = d + d.transpose();
    out.im = c.transpose() - c;
    if (gamma > 0.0) {
      out.r.topRightCorner(nl, nl) -= 2.0 * gamma * s.r.topRightCorner(nl, nl);
      out.r.bottomLeftCorner(nl, nl) -= 2.0 * gamma * s.r.bottomLeftCorner(nl, nl);
      out.im.topRightCorner(nl, nl) -= 2.0 * gamma * s.im.topRightCorner(nl, nl);
      out.im.bottomLeftCorner(nl, nl) -= 2.0 * gamma * s.im.bottomLeftCorner(nl, nl);
    }
  }
};

inline std::vector<double> integrate_coherence(
    const DimerParams& params, int n_max,
    const std::function<void(double, const DensityMatrix&)>& observer,
    std::size_t observer_stride) {
  DimerParams p = params;
  p.n_max = n_max;
  const Eigen::Index nl = n_max + 1;
  const Eigen::Index dim = 2 * nl;
  const Eigen::MatrixXd h = build_hamiltonian(p).real();

  SplitState s{Eigen::MatrixXd::Zero(dim, dim), Eigen::MatrixXd::Zero(dim, dim)};
  s.r(0, 0) = 0.5;
  s.r(nl, nl) = 0.5;
  s.r(0, nl) = -0.5;
  s.r(nl, 0) = -0.5;

  const SplitRhs rhs{h, p.gamma, nl};
  const double dt = params.grid.dt();
  const std::size_t n = params.grid.size();

  std::vector<double> coh(n);
  SplitState k1, k2, k3, k4, tmp;

  auto record = [&](std::size_t i) {
    double re = 0.0;
    for (Eigen::Index m = 0; m < nl; ++m) re += s.r(nl + m, m);
    coh[i] = re;
    const double trace = s.r.trace();
    if (!(std::abs(trace - 1.0) <= 1e-6))
      throw StepUnstable("evolve: trace drifted to " + std::to_string(trace) +
                         " at t=" + std::to_string(params.grid.time(i)));
    if (observer && i % observer_stride == 0) {
      Eigen::MatrixXcd full =
          s.r.cast<std::complex<double>>() +
          std::complex<double>(0.0, 1.0) * s.im.cast<std::complex<double>>();
      observer(params.grid.time(i), DensityMatrix(std::move(full)));
    }
  };

  record(0);
  for (std::size_t i = 1; i < n; ++i) {
    rhs(s, k1);
    tmp.r = s.r + 0.5 * dt * k1.r;
    tmp.im = s.im + 0.5 * dt * k1.im;
    rhs(tmp, k2);
    tmp.r = s.r + 0.5 * dt * k2.r;
    tmp.im = s.im + 0.5 * dt * k2.im;
    rhs(tmp, k3);
    tmp.r = s.r + dt * k3.r;
    tmp.im = s.im + dt * k3.im;
    rhs(tmp, k4);
    s.r += (dt / 6.0) * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r);
    s.im += (dt / 6.0) * (k1.im + 2.0 * k2.im + 2.0 * k3.im + k4.im);
    record(i);
  }
  return coh;
}

}  // namespace detail

/// Integrate the dephasing master equation from initial_state over the grid
/// with fixed-step classical RK4 (step = grid.dt()), recording the electronic
/// coherence at every grid point.
///
/// With check_truncation on, the trajectory is re-run at n_max+4 and the two
/// traces must agree within 1e-8 in max norm, else TruncationNotConverged.
inline CoherenceTrace evolve(const DimerParams& params,
                             const EvolveOptions& options = {}) {
  detail::validate(params);
  if (options.observer_stride == 0)
    throw InvalidParameter("evolve: observer_stride must be >= 1");
  std::vector<double> coh = detail::integrate_coherence(
      params, params.n_max, options.observer, options.observer_stride);
  if (options.check_truncation) {
    const std::vector<double> ref =
        detail::integrate_coherence(params, params.n_max + 4, nullptr, 1);
    double dev = 0.0;
    for (std::size_t i = 0; i < coh.size(); ++i)
      dev = std::max(dev, std::abs(coh[i] - ref[i]));
    if (!(dev < 1e-8))
      throw TruncationNotConverged(
          "evolve: coherence trace changes by " + std::to_string(dev) +
          " when raising n_max from " + std::to_string(params.n_max) + " to " +
          std::to_string(params.n_max + 4));
  }
  return CoherenceTrace(params.grid, std::move(coh));
}

}  // namespace tfridge
