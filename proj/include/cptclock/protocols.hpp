// Ramsey CPT clock protocols on the Dicke state: conventional, Schroedinger
// cat (SCSP), generalized small-mu SCSP, and echo squeezing (ESP).
//
// All detuning dependence goes through the accumulated dark-period phase
// delta*T; uncertainties are reported as the dimensionless Delta(delta)*T.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "cptclock/analysis.hpp"
#include "cptclock/dicke.hpp"
#include "cptclock/pulse.hpp"

namespace cptclock {

struct MeasurementStats {
  double expect = 0.0;
  double std_dev = 0.0;
  double slope = 0.0;
  /// std_dev / |slope|; empty when |slope| is below the slope floor.
  std::optional<double> uncertainty_dT;

  bool undefined() const noexcept { return !uncertainty_dT.has_value(); }
};

struct FringeScan {
  std::vector<double> phases;
  std::vector<MeasurementStats> stats;
  std::string label;
};

struct SlopeOptions {
  double step = 1e-5;
  double floor = 1e-9;
};

inline const char* to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::conventional: return "conventional";
    case ProtocolKind::scsp: return "scsp";
    case ProtocolKind::generalized_scsp: return "generalized-scsp";
    case ProtocolKind::esp: return "esp";
  }
  return "?";
}

/// Builds the pulse sequence for a protocol. mu is required for the
/// generalized SCSP, fixed to pi/2 for SCSP, defaults to arccot(sqrt(N-2))
/// for ESP and is ignored for the conventional clock. parity_target picks the
/// axis of the auxiliary rotations (x for odd N, y for even N) for SCSP
/// variants.
inline ProtocolSpec build_spec(ProtocolKind kind, int n_atoms, std::optional<double> mu = {},
                               Parity parity_target = Parity::odd) {
  if (n_atoms < 1) throw std::invalid_argument("build_spec: n_atoms must be >= 1");
  constexpr double half_pi = 0.5 * std::numbers::pi;
  ProtocolSpec spec;
  spec.n_atoms = n_atoms;
  spec.label = to_string(kind);

  if (kind == ProtocolKind::conventional) {
    spec.steps = {step::SaturatingCpt{}, step::Dark{0.0}, step::Measure{Axis::x}};
    validate(spec);
    return spec;
  }

  double twist = half_pi;
  Axis readout = Axis::x;
  Axis aux = parity_target == Parity::odd ? Axis::x : Axis::y;
  switch (kind) {
    case ProtocolKind::scsp:
      break;
    case ProtocolKind::generalized_scsp:
      if (!mu) throw std::invalid_argument("build_spec: generalized SCSP needs mu");
      twist = *mu;
      break;
    case ProtocolKind::esp:
      twist = mu ? *mu : analysis::optimal_mu(n_atoms);
      readout = Axis::y;
      aux = Axis::x;
      break;
    default:
      throw std::invalid_argument("build_spec: unknown protocol kind");
  }
  spec.steps = {step::SaturatingCpt{},
                step::Squeeze{twist, Twist::squeeze},
                step::Rotate{aux, half_pi},
                step::Dark{0.0},
                step::Rotate{aux, -half_pi},
                step::Squeeze{twist, Twist::unsqueeze},
                step::Measure{readout}};
  if (parity_target == Parity::even && kind != ProtocolKind::esp) spec.label += "-even";
  validate(spec);
  return spec;
}

/// Copy of spec with every auxiliary rotation moved onto the given axis.
inline ProtocolSpec with_auxiliary_axis(ProtocolSpec spec, Axis axis) {
  for (auto& s : spec.steps) {
    if (auto* r = std::get_if<step::Rotate>(&s)) r->axis = axis;
  }
  return spec;
}

inline DickeState apply_step(const DickeState& state, const PulseStep& s) {
  return std::visit(
      [&](const auto& v) -> DickeState {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, step::SaturatingCpt>) {
          return css(state.n_atoms(), 0.5 * std::numbers::pi, std::numbers::pi);
        } else if constexpr (std::is_same_v<T, step::Squeeze>) {
          return squeeze(state, v.mu, v.sign);
        } else if constexpr (std::is_same_v<T, step::Rotate>) {
          return rotate(state, v.axis, v.angle);
        } else if constexpr (std::is_same_v<T, step::Dark>) {
          return dark_evolve(state, v.phase);
        } else {
          return state;
        }
      },
      s);
}

/// State right before the readout pulse, with every dark period set to dT.
inline DickeState pre_measurement_state(const ProtocolSpec& spec, double dT) {
  validate(spec);
  DickeState state = css(spec.n_atoms, 0.5 * std::numbers::pi, std::numbers::pi);
  for (const auto& s : spec.steps) {
    if (std::holds_alternative<step::Measure>(s)) break;
    if (std::holds_alternative<step::Dark>(s)) {
      state = dark_evolve(state, dT);
    } else {
      state = apply_step(state, s);
    }
  }
  return state;
}

/// Readout moments only, without the slope.
inline SpinMoments measure(const ProtocolSpec& spec, double dT) {
  return spin_moments(pre_measurement_state(spec, dT), spec.measurement().observable);
}

namespace detail {

inline std::optional<double> uncertainty_from(double std_dev, double slope, double floor) {
  if (!(std::abs(slope) >= floor)) return std::nullopt;
  return std_dev / std::abs(slope);
}

template <class Signal>
double central_slope(Signal&& signal, double dT, double step) {
  return (signal(dT + step) - signal(dT - step)) / (2.0 * step);
}

}  // namespace detail

inline MeasurementStats run_protocol(const ProtocolSpec& spec, double dT, SlopeOptions opts = {}) {
  if (!std::isfinite(dT)) throw std::invalid_argument("run_protocol: dT not finite");
  const auto moments = measure(spec, dT);
  const double slope =
      detail::central_slope([&](double x) { return measure(spec, x).mean; }, dT, opts.step);
  return {moments.mean, moments.std_dev, slope,
          detail::uncertainty_from(moments.std_dev, slope, opts.floor)};
}

inline std::optional<double> uncertainty(const ProtocolSpec& spec, double dT,
                                         double slope_step = SlopeOptions{}.step) {
  return run_protocol(spec, dT, {slope_step, SlopeOptions{}.floor}).uncertainty_dT;
}

/// Evaluates run_protocol at each phase. Results are ordered by index
/// regardless of thread count.
inline FringeScan fringe_scan(const ProtocolSpec& spec, const std::vector<double>& phases,
                              unsigned threads = 1, SlopeOptions opts = {}) {
  if (phases.empty()) throw std::invalid_argument("fringe_scan: no phases");
  for (std::size_t i = 1; i < phases.size(); ++i) {
    if (!(phases[i] > phases[i - 1])) {
      throw std::invalid_argument("fringe_scan: phases must be strictly increasing");
    }
  }
  validate(spec);
  FringeScan scan{phases, std::vector<MeasurementStats>(phases.size()), spec.label};
  threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(phases.size()));
  if (threads == 1) {
    for (std::size_t i = 0; i < phases.size(); ++i) scan.stats[i] = run_protocol(spec, phases[i], opts);
    return scan;
  }
  // Warm the rotation cache once so workers only read it.
  if (spec.n_atoms <= dense_atom_limit()) (void)detail::sx_eigenbasis(spec.n_atoms);
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < phases.size(); i += threads) {
          scan.stats[i] = run_protocol(spec, phases[i], opts);
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return scan;
}

inline bool is_conventional(const ProtocolSpec& spec) {
  return spec.steps.size() == 3 && std::holds_alternative<step::SaturatingCpt>(spec.steps[0]) &&
         std::holds_alternative<step::Dark>(spec.steps[1]) &&
         std::holds_alternative<step::Measure>(spec.steps[2]) &&
         spec.measurement().observable == Axis::x;
}

/// Square-wave interrogation of the conventional clock at dT +- pi/2:
/// S_c = [S_x(dT + pi/2) - S_x(dT - pi/2)] / 2.
inline MeasurementStats hopping_stats(const ProtocolSpec& spec, double dT, SlopeOptions opts = {}) {
  if (!is_conventional(spec)) {
    throw std::invalid_argument("hopping_stats: needs the conventional protocol");
  }
  constexpr double hop = 0.5 * std::numbers::pi;
  auto signal = [&](double x) { return 0.5 * (measure(spec, x + hop).mean - measure(spec, x - hop).mean); };
  const auto plus = measure(spec, dT + hop);
  const auto minus = measure(spec, dT - hop);
  const double expect = 0.5 * (plus.mean - minus.mean);
  const double std_dev =
      std::sqrt(0.5 * (plus.std_dev * plus.std_dev + minus.std_dev * minus.std_dev));
  const double slope = detail::central_slope(signal, dT, opts.step);
  return {expect, std_dev, slope, detail::uncertainty_from(std_dev, slope, opts.floor)};
}

/// Equal mix of an even-N and an odd-N trial (n_atoms_even and
/// n_atoms_even + 1), both run with the odd-optimized sequence. Signal and
/// variance are averaged; the uncertainty uses the averaged slope.
inline MeasurementStats parity_average(ProtocolKind kind, int n_atoms_even, std::optional<double> mu,
                                       double dT, SlopeOptions opts = {}) {
  if (n_atoms_even < 2 || n_atoms_even % 2 != 0) {
    throw std::invalid_argument("parity_average: n_atoms_even must be even and >= 2");
  }
  const auto even = run_protocol(build_spec(kind, n_atoms_even, mu, Parity::odd), dT, opts);
  const auto odd = run_protocol(build_spec(kind, n_atoms_even + 1, mu, Parity::odd), dT, opts);
  const double expect = 0.5 * (even.expect + odd.expect);
  const double std_dev = std::sqrt(0.5 * (even.std_dev * even.std_dev + odd.std_dev * odd.std_dev));
  const double slope = 0.5 * (even.slope + odd.slope);
  return {expect, std_dev, slope, detail::uncertainty_from(std_dev, slope, opts.floor)};
}

}  // namespace cptclock
