// Brute-force 2^N product-space simulator, kept independent of the Dicke
// machinery so it can cross-check it. Basis index bit j set means atom j
// is |down>; index 0 is |up ... up>.
#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cptclock/errors.hpp"
#include "cptclock/pulse.hpp"

namespace cptclock::oracle {

inline constexpr int kMaxAtoms = 14;

using Complex = std::complex<double>;

struct ProductState {
  int n_atoms = 0;
  std::vector<Complex> amplitudes;
};

struct Moments {
  double expect = 0.0;
  double std_dev = 0.0;
};

namespace detail {

inline void check_size(int n_atoms) {
  if (n_atoms < 1) throw std::invalid_argument("oracle: n_atoms must be >= 1");
  if (n_atoms > kMaxAtoms) {
    throw ResourceLimitError("oracle: N = " + std::to_string(n_atoms) + " exceeds cap " +
                             std::to_string(kMaxAtoms));
  }
}

// Total S_z for a basis string.
inline double m_total(int n_atoms, std::uint32_t bits) {
  return 0.5 * n_atoms - std::popcount(bits);
}

using Qubit = std::array<std::array<Complex, 2>, 2>;

// exp(-i angle s_axis) for a single spin-1/2, written out in closed form.
inline Qubit single_rotation(Axis axis, double angle) {
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  const Complex i{0.0, 1.0};
  switch (axis) {
    case Axis::x: return {{{c, -i * s}, {-i * s, c}}};
    case Axis::y: return {{{c, -s}, {s, c}}};
    case Axis::z: return {{{std::polar(1.0, -0.5 * angle), 0.0}, {0.0, std::polar(1.0, 0.5 * angle)}}};
  }
  throw std::invalid_argument("oracle: unknown axis");
}

inline void apply_qubit(std::vector<Complex>& amps, int qubit, const Qubit& u) {
  const std::size_t mask = std::size_t{1} << qubit;
  for (std::size_t idx = 0; idx < amps.size(); ++idx) {
    if (idx & mask) continue;
    const Complex up = amps[idx];
    const Complex down = amps[idx | mask];
    amps[idx] = u[0][0] * up + u[0][1] * down;
    amps[idx | mask] = u[1][0] * up + u[1][1] * down;
  }
}

// sum_j s_axis^(j) |psi>
inline std::vector<Complex> apply_collective(const ProductState& s, Axis axis) {
  std::vector<Complex> out(s.amplitudes.size(), 0.0);
  const Complex i{0.0, 1.0};
  for (std::size_t idx = 0; idx < s.amplitudes.size(); ++idx) {
    const Complex a = s.amplitudes[idx];
    for (int q = 0; q < s.n_atoms; ++q) {
      const std::size_t mask = std::size_t{1} << q;
      const bool down = idx & mask;
      switch (axis) {
        case Axis::z: out[idx] += (down ? -0.5 : 0.5) * a; break;
        case Axis::x: out[idx ^ mask] += 0.5 * a; break;
        // s_y|up> = (i/2)|down>, s_y|down> = -(i/2)|up>
        case Axis::y: out[idx ^ mask] += (down ? -0.5 * i : 0.5 * i) * a; break;
      }
    }
  }
  return out;
}

}  // namespace detail

inline ProductState oracle_css(int n_atoms, double theta, double phi) {
  detail::check_size(n_atoms);
  const Complex up = std::cos(0.5 * theta);
  const Complex down = std::polar(1.0, phi) * std::sin(0.5 * theta);
  ProductState s{n_atoms, std::vector<Complex>(std::size_t{1} << n_atoms)};
  for (std::size_t idx = 0; idx < s.amplitudes.size(); ++idx) {
    Complex a = 1.0;
    for (int q = 0; q < n_atoms; ++q) a *= (idx >> q) & 1U ? down : up;
    s.amplitudes[idx] = a;
  }
  return s;
}

/// Applies squeeze, rotate or dark steps; anything else is rejected.
inline ProductState oracle_apply(ProductState state, const PulseStep& step) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, step::Squeeze>) {
          const double mu = static_cast<int>(v.sign) * v.mu;
          for (std::size_t idx = 0; idx < state.amplitudes.size(); ++idx) {
            const double m = detail::m_total(state.n_atoms, static_cast<std::uint32_t>(idx));
            state.amplitudes[idx] *= std::polar(1.0, -mu * m * m);
          }
        } else if constexpr (std::is_same_v<T, step::Dark>) {
          for (std::size_t idx = 0; idx < state.amplitudes.size(); ++idx) {
            const double m = detail::m_total(state.n_atoms, static_cast<std::uint32_t>(idx));
            state.amplitudes[idx] *= std::polar(1.0, -v.phase * m);
          }
        } else if constexpr (std::is_same_v<T, step::Rotate>) {
          const auto u = detail::single_rotation(v.axis, v.angle);
          for (int q = 0; q < state.n_atoms; ++q) detail::apply_qubit(state.amplitudes, q, u);
        } else {
          throw std::invalid_argument("oracle_apply: unsupported step " + describe(v));
        }
      },
      step);
  return state;
}

inline Moments oracle_measure(const ProductState& state, Axis which) {
  const auto applied = detail::apply_collective(state, which);
  Complex mean = 0.0;
  for (std::size_t idx = 0; idx < applied.size(); ++idx) {
    mean += std::conj(state.amplitudes[idx]) * applied[idx];
  }
  double variance = 0.0;
  for (std::size_t idx = 0; idx < applied.size(); ++idx) {
    variance += std::norm(applied[idx] - mean.real() * state.amplitudes[idx]);
  }
  return {mean.real(), std::sqrt(variance)};
}

inline double norm(const ProductState& state) {
  double sum = 0.0;
  for (const auto& a : state.amplitudes) sum += std::norm(a);
  return std::sqrt(sum);
}

/// Weight of the state inside the symmetric subspace: sum_k |<D_k|psi>|^2,
/// with |D_k> the normalized sum over strings with k down spins.
inline double symmetric_weight(const ProductState& state) {
  std::vector<Complex> overlaps(state.n_atoms + 1, 0.0);
  for (std::size_t idx = 0; idx < state.amplitudes.size(); ++idx) {
    overlaps[std::popcount(static_cast<std::uint32_t>(idx))] += state.amplitudes[idx];
  }
  double weight = 0.0;
  for (int k = 0; k <= state.n_atoms; ++k) {
    const double binom = std::exp(std::lgamma(state.n_atoms + 1.0) - std::lgamma(k + 1.0) -
                                  std::lgamma(state.n_atoms - k + 1.0));
    weight += std::norm(overlaps[k]) / binom;
  }
  return weight;
}

/// Runs a whole protocol in product space; the saturating pulse resets to
/// the dark state and every Dark step takes phase dT.
inline Moments oracle_run(const ProtocolSpec& spec, double dT) {
  validate(spec);
  ProductState state = oracle_css(spec.n_atoms, 0.5 * std::numbers::pi, std::numbers::pi);
  for (const auto& s : spec.steps) {
    if (std::holds_alternative<step::SaturatingCpt>(s)) {
      state = oracle_css(spec.n_atoms, 0.5 * std::numbers::pi, std::numbers::pi);
    } else if (const auto* m = std::get_if<step::Measure>(&s)) {
      return oracle_measure(state, m->observable);
    } else if (std::holds_alternative<step::Dark>(s)) {
      state = oracle_apply(std::move(state), step::Dark{dT});
    } else {
      state = oracle_apply(std::move(state), s);
    }
  }
  throw std::logic_error("oracle_run: missing Measure step");
}

}  // namespace cptclock::oracle
