// Three-level Lambda system {|up>, |e>, |down>} driven by two Raman beams,
// with spontaneous emission from |e>. Used to model the saturating CPT pulse
// that pumps atoms into the dark state.
#pragma once

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cptclock/errors.hpp"

namespace cptclock::lambda {

using Complex = std::complex<double>;
using Matrix3 = Eigen::Matrix3cd;
using Vector3 = Eigen::Vector3cd;

/// Basis indices.
inline constexpr int kUp = 0;
inline constexpr int kExcited = 1;
inline constexpr int kDown = 2;

/// Excited-state decay rate whose pumping rule 10 * 2pi Gamma / Omega^2 gives
/// 1.6 us at Omega = Gamma.
inline constexpr double kDefaultGamma = 2.0 * std::numbers::pi * 6.25e6;

/// All rates in rad/s.
struct LambdaParams {
  double rabi_up = kDefaultGamma;
  double rabi_down = kDefaultGamma;
  double delta = 0.0;      // difference detuning
  double big_delta = 0.0;  // common detuning
  double phi0 = 0.0;       // Raman phase difference
  double gamma = kDefaultGamma;
  double branch_up = 0.5;
  double branch_down = 0.5;
  double loss_fraction = 0.0;

  void validate() const {
    if (!(gamma >= 0.0)) throw std::invalid_argument("LambdaParams: gamma must be >= 0");
    if (branch_up < 0.0 || branch_down < 0.0 || loss_fraction < 0.0) {
      throw std::invalid_argument("LambdaParams: branching fractions must be >= 0");
    }
    if (std::abs(branch_up + branch_down + loss_fraction - 1.0) > 1e-12) {
      throw std::invalid_argument("LambdaParams: branch_up + branch_down + loss_fraction must be 1");
    }
    for (double v : {rabi_up, rabi_down, delta, big_delta, phi0}) {
      if (!std::isfinite(v)) throw std::invalid_argument("LambdaParams: non-finite parameter");
    }
  }
};

struct LambdaDensity {
  Matrix3 rho = Matrix3::Zero();
  /// Population still inside the three-level manifold.
  double survived = 1.0;

  static LambdaDensity pure(const Vector3& psi) {
    const Vector3 n = psi.normalized();
    return {n * n.adjoint(), 1.0};
  }
  static LambdaDensity basis(int index) {
    LambdaDensity d;
    d.rho(index, index) = 1.0;
    return d;
  }

  double population(int index) const { return rho(index, index).real(); }
  double trace() const { return rho.trace().real(); }
  double purity() const { return (rho * rho).trace().real(); }
  double hermiticity_error() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }
  double min_eigenvalue() const {
    const Matrix3 h = 0.5 * (rho + rho.adjoint());
    return Eigen::SelfAdjointEigenSolver<Matrix3>(h, Eigen::EigenvaluesOnly).eigenvalues()(0);
  }
};

struct TrajectoryPoint {
  double time = 0.0;
  LambdaDensity density;
};

struct IntegratorOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  /// Upper bound on the step; <= 0 selects Gamma^-1 / 20.
  double dt_max = 0.0;
  /// Steps smaller than this (relative to dt_max) count as underflow.
  double min_step_ratio = 1e-12;
};

/// H = (1/2) [[delta, W_up, 0], [W_up, -2 Delta, W_down e^{-i phi0}], [0, W_down e^{i phi0}, -delta]]
inline Matrix3 hamiltonian(const LambdaParams& p) {
  Matrix3 h = Matrix3::Zero();
  h(kUp, kUp) = p.delta;
  h(kUp, kExcited) = h(kExcited, kUp) = p.rabi_up;
  h(kExcited, kExcited) = -2.0 * p.big_delta;
  h(kExcited, kDown) = p.rabi_down * std::polar(1.0, -p.phi0);
  h(kDown, kExcited) = p.rabi_down * std::polar(1.0, p.phi0);
  h(kDown, kDown) = -p.delta;
  return 0.5 * h;
}

struct DarkBright {
  Vector3 dark;
  Vector3 bright;
};

/// Ground-manifold states decoupled from (dark) and coupled to (bright) |e>.
inline DarkBright dark_bright(const LambdaParams& p) {
  const double norm = std::hypot(p.rabi_up, p.rabi_down);
  if (norm == 0.0) throw std::invalid_argument("dark_bright: both Rabi frequencies are zero");
  const Complex e = std::polar(1.0, p.phi0);
  DarkBright db;
  db.dark << p.rabi_down / norm, 0.0, -e * p.rabi_up / norm;
  db.bright << p.rabi_up / norm, 0.0, e * p.rabi_down / norm;
  return db;
}

inline double dark_population(const LambdaDensity& d, const LambdaParams& p) {
  const Vector3 dark = dark_bright(p).dark;
  return std::clamp((dark.adjoint() * d.rho * dark)(0, 0).real(), 0.0, 1.0);
}

inline double bright_population(const LambdaDensity& d, const LambdaParams& p) {
  const Vector3 bright = dark_bright(p).bright;
  return std::clamp((bright.adjoint() * d.rho * bright)(0, 0).real(), 0.0, 1.0);
}

/// Lindblad generator: coherent part from H, jumps |e> -> |up>, |e> -> |down>
/// at Gamma * branch, plus the full decay of |e> (the loss share leaves the
/// manifold without a jump, so the trace leaks).
inline Matrix3 lindblad_rhs(const LambdaParams& p, const Matrix3& h, const Matrix3& rho) {
  const Complex i{0.0, 1.0};
  Matrix3 d = -i * (h * rho - rho * h);
  const Complex ee = rho(kExcited, kExcited);
  d(kUp, kUp) += p.gamma * p.branch_up * ee;
  d(kDown, kDown) += p.gamma * p.branch_down * ee;
  // -(Gamma/2) {|e><e|, rho}
  for (int k = 0; k < 3; ++k) {
    d(kExcited, k) -= 0.5 * p.gamma * rho(kExcited, k);
    d(k, kExcited) -= 0.5 * p.gamma * rho(k, kExcited);
  }
  return d;
}

namespace detail {

using State = std::array<double, 18>;

inline State pack(const Matrix3& m) {
  State s{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      s[2 * (3 * r + c)] = m(r, c).real();
      s[2 * (3 * r + c) + 1] = m(r, c).imag();
    }
  }
  return s;
}

inline Matrix3 unpack(const State& s) {
  Matrix3 m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = {s[2 * (3 * r + c)], s[2 * (3 * r + c) + 1]};
  }
  return m;
}

inline LambdaDensity to_density(const State& s) {
  LambdaDensity d{unpack(s), 0.0};
  d.survived = d.trace();
  return d;
}

inline double resolve_dt_max(const LambdaParams& p, double requested, double duration) {
  if (requested > 0.0) return requested;
  if (p.gamma > 0.0) return 1.0 / (20.0 * p.gamma);
  const double fastest = std::max({std::abs(p.rabi_up), std::abs(p.rabi_down), std::abs(p.delta),
                                   std::abs(p.big_delta)});
  if (fastest > 0.0) return 1.0 / (20.0 * fastest);
  return duration > 0.0 ? duration : 1.0;
}

/// Drives a dense-output Dormand-Prince stepper from 0 to `until`; calls
/// on_step(t_prev, t_now, stepper) after every accepted step and stops early
/// when it returns false.
template <class OnStep>
void integrate(const LambdaParams& p, const LambdaDensity& rho0, double until,
               const IntegratorOptions& opts, OnStep&& on_step) {
  namespace odeint = boost::numeric::odeint;
  const Matrix3 h = hamiltonian(p);
  auto system = [&](const State& x, State& dxdt, double /*t*/) {
    dxdt = pack(lindblad_rhs(p, h, unpack(x)));
  };
  const double dt_max = resolve_dt_max(p, opts.dt_max, until);
  const double dt_min = dt_max * opts.min_step_ratio;
  auto stepper = odeint::make_dense_output(opts.abs_tol, opts.rel_tol, dt_max,
                                           odeint::runge_kutta_dopri5<State>());
  stepper.initialize(pack(rho0.rho), 0.0, std::min(dt_max, until) * 0.1);
  while (stepper.current_time() < until) {
    std::pair<double, double> span;
    try {
      span = stepper.do_step(system);
    } catch (const std::exception& e) {
      throw IntegratorFailure(std::string("lambda integrator: ") + e.what(), stepper.current_time(),
                              stepper.current_time_step());
    }
    for (double v : stepper.current_state()) {
      if (!std::isfinite(v)) {
        throw IntegratorFailure("lambda integrator: non-finite state", span.second,
                                span.second - span.first);
      }
    }
    if (span.second - span.first < dt_min && span.second < until) {
      throw IntegratorFailure("lambda integrator: step size underflow", span.second,
                              span.second - span.first);
    }
    if (!on_step(span.first, span.second, stepper)) return;
  }
}

}  // namespace detail

/// Integrates the master equation over [0, duration]. The trajectory holds
/// the initial state and one point per accepted step, ending exactly at
/// `duration`.
inline std::vector<TrajectoryPoint> evolve(const LambdaParams& params, const LambdaDensity& rho0,
                                           double duration, IntegratorOptions opts = {}) {
  params.validate();
  if (!(duration >= 0.0)) throw std::invalid_argument("evolve: duration must be >= 0");
  std::vector<TrajectoryPoint> out{{0.0, rho0}};
  if (duration == 0.0) return out;
  detail::integrate(params, rho0, duration, opts, [&](double, double t, auto& stepper) {
    if (t > duration) {
      detail::State x{};
      stepper.calc_state(duration, x);
      out.push_back({duration, detail::to_density(x)});
    } else {
      out.push_back({t, detail::to_density(stepper.current_state())});
    }
    return true;
  });
  return out;
}

struct PumpingOptions {
  double threshold = 0.99;
  double horizon = 20e-6;
  IntegratorOptions integrator{};
};

struct PumpingResult {
  double time = 0.0;
  double dark_population = 0.0;
};

/// First time the dark-state population reaches the threshold, bisected on
/// the dense-output interpolant of the step that crosses it.
inline PumpingResult pumping_time(const LambdaParams& params,
                                  const LambdaDensity& rho0 = LambdaDensity::basis(kUp),
                                  PumpingOptions opts = {}) {
  params.validate();
  if (!(opts.threshold > 0.0 && opts.threshold < 1.0)) {
    throw std::invalid_argument("pumping_time: threshold must lie in (0, 1)");
  }
  const double start = dark_population(rho0, params);
  if (start >= opts.threshold) return {0.0, start};

  std::optional<PumpingResult> found;
  double last = start;
  detail::integrate(params, rho0, opts.horizon, opts.integrator,
                    [&](double t0, double t1, auto& stepper) {
                      last = dark_population(detail::to_density(stepper.current_state()), params);
                      if (last < opts.threshold) return true;
                      double lo = t0;
                      double hi = t1;
                      detail::State x{};
                      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        stepper.calc_state(mid, x);
                        if (dark_population(detail::to_density(x), params) >= opts.threshold) {
                          hi = mid;
                        } else {
                          lo = mid;
                        }
                      }
                      stepper.calc_state(hi, x);
                      found = PumpingResult{hi, dark_population(detail::to_density(x), params)};
                      return false;
                    });
  if (!found) {
    throw NotReachedError("pumping_time: dark population " + std::to_string(last) +
                              " below threshold " + std::to_string(opts.threshold) +
                              " after " + std::to_string(opts.horizon) + " s",
                          last);
  }
  return *found;
}

/// The rule of thumb 10 * (Omega^2 / (2 pi Gamma))^-1 for the pumping time.
inline double pumping_time_estimate(double rabi, double gamma) {
  return 10.0 * 2.0 * std::numbers::pi * gamma / (rabi * rabi);
}

}  // namespace cptclock::lambda
