// Collective spin states of N pseudo-spin-1/2 atoms in the symmetric
// (Dicke) subspace J = N/2.
//
// Basis index k in [0, N] maps to magnetic number m = N/2 - k, so S_z is
// diagonal with descending entries. Global phases are never normalized
// away; compare states with fidelity().
#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "cptclock/errors.hpp"

namespace cptclock {

using Complex = std::complex<double>;
using StateVector = Eigen::VectorXcd;
using HermitianMatrix = Eigen::MatrixXcd;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kImagTolerance = 1e-10;

enum class Axis { x, y, z };

inline const char* to_string(Axis axis) {
  switch (axis) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "?";
}

/// Direction of the one-axis twist: exp(-i * sign * mu * S_z^2).
enum class Twist : int { squeeze = 1, unsqueeze = -1 };

/// Soft cap on N for operations that need dense (N+1)x(N+1) matrices.
/// Diagonal operations (z rotation, twist, dark evolution) ignore it.
inline std::atomic<int>& dense_atom_limit() {
  static std::atomic<int> limit{10000};
  return limit;
}

class DickeState {
 public:
  /// Validates length N+1 and unit norm.
  DickeState(int n_atoms, StateVector amplitudes)
      : n_atoms_(n_atoms), amplitudes_(std::move(amplitudes)) {
    if (n_atoms_ < 1) throw std::invalid_argument("DickeState: n_atoms must be >= 1");
    if (amplitudes_.size() != n_atoms_ + 1) {
      throw std::invalid_argument("DickeState: expected " + std::to_string(n_atoms_ + 1) +
                                  " amplitudes, got " + std::to_string(amplitudes_.size()));
    }
    const double err = std::abs(amplitudes_.norm() - 1.0);
    if (!(err <= kNormTolerance)) {
      throw std::invalid_argument("DickeState: amplitudes not normalized (|norm-1| = " +
                                  std::to_string(err) + ")");
    }
  }

  int n_atoms() const noexcept { return n_atoms_; }
  Eigen::Index dim() const noexcept { return amplitudes_.size(); }
  const StateVector& amplitudes() const noexcept { return amplitudes_; }
  Complex operator[](Eigen::Index k) const { return amplitudes_(k); }

  double magnetic_number(Eigen::Index k) const noexcept {
    return 0.5 * n_atoms_ - static_cast<double>(k);
  }

  double norm() const { return amplitudes_.norm(); }

 private:
  struct Unchecked {};
  DickeState(Unchecked, int n_atoms, StateVector amplitudes)
      : n_atoms_(n_atoms), amplitudes_(std::move(amplitudes)) {}

  friend DickeState make_unchecked(int n_atoms, StateVector amplitudes);

  int n_atoms_;
  StateVector amplitudes_;
};

/// Internal constructor for results of unitary operations, which are
/// norm-preserving by construction up to rounding.
inline DickeState make_unchecked(int n_atoms, StateVector amplitudes) {
  return DickeState(DickeState::Unchecked{}, n_atoms, std::move(amplitudes));
}

struct CollectiveOperators {
  int n_atoms = 0;
  HermitianMatrix sx;
  HermitianMatrix sy;
  HermitianMatrix sz;
  HermitianMatrix sz2;

  const HermitianMatrix& operator[](Axis axis) const {
    switch (axis) {
      case Axis::x: return sx;
      case Axis::y: return sy;
      case Axis::z: return sz;
    }
    throw std::invalid_argument("unknown axis");
  }
};

namespace detail {

inline void require_atoms(int n_atoms, const char* where) {
  if (n_atoms < 1) throw std::invalid_argument(std::string(where) + ": n_atoms must be >= 1");
}

inline void require_dense(int n_atoms, const char* where) {
  if (n_atoms > dense_atom_limit().load()) {
    throw ResourceLimitError(std::string(where) + ": N = " + std::to_string(n_atoms) +
                             " exceeds the dense-matrix limit " +
                             std::to_string(dense_atom_limit().load()));
  }
}

/// Ladder coupling between index k and k+1: sqrt(J(J+1) - m(m+1)) with
/// m = N/2 - k - 1, which simplifies to sqrt((k+1)(N-k)).
inline double ladder(int n_atoms, Eigen::Index k) {
  return std::sqrt(static_cast<double>(k + 1) * static_cast<double>(n_atoms - k));
}

/// Eigenbasis of S_x. S_x is real symmetric tridiagonal, so the basis is real.
struct SxEigenbasis {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd vectors;
};

inline std::shared_ptr<const SxEigenbasis> build_sx_eigenbasis(int n_atoms) {
  const Eigen::Index dim = n_atoms + 1;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd sub(dim - 1);
  for (Eigen::Index k = 0; k + 1 < dim; ++k) sub(k) = 0.5 * ladder(n_atoms, k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("S_x eigendecomposition failed for N = " + std::to_string(n_atoms));
  }
  auto basis = std::make_shared<SxEigenbasis>();
  basis->eigenvalues = solver.eigenvalues();
  basis->vectors = solver.eigenvectors();
  return basis;
}

/// Per-N cache. Entries are immutable once inserted.
inline std::shared_ptr<const SxEigenbasis> sx_eigenbasis(int n_atoms) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const SxEigenbasis>> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(n_atoms); it != cache.end()) return it->second;
  }
  auto basis = build_sx_eigenbasis(n_atoms);
  std::lock_guard lock(mutex);
  return cache.emplace(n_atoms, std::move(basis)).first->second;
}

inline void apply_z_phase(StateVector& amps, int n_atoms, double angle) {
  for (Eigen::Index k = 0; k < amps.size(); ++k) {
    const double m = 0.5 * n_atoms - static_cast<double>(k);
    amps(k) *= std::polar(1.0, -angle * m);
  }
}

inline void apply_x_rotation(StateVector& amps, int n_atoms, double angle) {
  const auto basis = sx_eigenbasis(n_atoms);
  StateVector coeffs = basis->vectors.transpose().cast<Complex>() * amps;
  for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
    coeffs(j) *= std::polar(1.0, -angle * basis->eigenvalues(j));
  }
  amps = basis->vectors.cast<Complex>() * coeffs;
}

}  // namespace detail

inline CollectiveOperators make_operators(int n_atoms) {
  detail::require_atoms(n_atoms, "make_operators");
  detail::require_dense(n_atoms, "make_operators");
  const Eigen::Index dim = n_atoms + 1;
  CollectiveOperators ops;
  ops.n_atoms = n_atoms;
  ops.sx = HermitianMatrix::Zero(dim, dim);
  ops.sy = HermitianMatrix::Zero(dim, dim);
  ops.sz = HermitianMatrix::Zero(dim, dim);
  const Complex i{0.0, 1.0};
  for (Eigen::Index k = 0; k < dim; ++k) {
    ops.sz(k, k) = 0.5 * n_atoms - static_cast<double>(k);
    if (k + 1 < dim) {
      const double b = detail::ladder(n_atoms, k);
      ops.sx(k, k + 1) = ops.sx(k + 1, k) = 0.5 * b;
      // S_y = (S_+ - S_-) / 2i, S_+ maps index k+1 to k.
      ops.sy(k, k + 1) = -0.5 * i * b;
      ops.sy(k + 1, k) = 0.5 * i * b;
    }
  }
  ops.sz2 = ops.sz * ops.sz;
  return ops;
}

/// Coherent spin state |theta, phi>: every atom in
/// cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>.
inline DickeState css(int n_atoms, double theta, double phi) {
  detail::require_atoms(n_atoms, "css");
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const double log_c = std::log(std::abs(c));
  const double log_s = std::log(std::abs(s));
  const double log_nfact = std::lgamma(n_atoms + 1.0);
  StateVector amps(n_atoms + 1);
  for (int k = 0; k <= n_atoms; ++k) {
    const int ups = n_atoms - k;
    // Zero powers contribute 1 even when the base is 0 (0^0 = 1).
    if ((ups > 0 && c == 0.0) || (k > 0 && s == 0.0)) {
      amps(k) = 0.0;
      continue;
    }
    double log_mag = 0.5 * (log_nfact - std::lgamma(k + 1.0) - std::lgamma(ups + 1.0));
    if (ups > 0) log_mag += ups * log_c;
    if (k > 0) log_mag += k * log_s;
    double sign = 1.0;
    if (c < 0.0 && ups % 2 == 1) sign = -sign;
    if (s < 0.0 && k % 2 == 1) sign = -sign;
    amps(k) = sign * std::exp(log_mag) * std::polar(1.0, k * phi);
  }
  amps.normalize();
  return make_unchecked(n_atoms, std::move(amps));
}

/// exp(-i * angle * S_axis) |state>.
inline DickeState rotate(const DickeState& state, Axis axis, double angle) {
  StateVector amps = state.amplitudes();
  const int n = state.n_atoms();
  switch (axis) {
    case Axis::z:
      detail::apply_z_phase(amps, n, angle);
      break;
    case Axis::x:
      detail::require_dense(n, "rotate");
      detail::apply_x_rotation(amps, n, angle);
      break;
    case Axis::y:
      detail::require_dense(n, "rotate");
      detail::apply_z_phase(amps, n, -0.5 * std::numbers::pi);
      detail::apply_x_rotation(amps, n, angle);
      detail::apply_z_phase(amps, n, 0.5 * std::numbers::pi);
      break;
  }
  return make_unchecked(n, std::move(amps));
}

/// One-axis twist exp(-i * sign * mu * S_z^2), applied as diagonal phases.
inline DickeState squeeze(const DickeState& state, double mu, Twist sign = Twist::squeeze) {
  if (!(mu >= 0.0)) throw std::invalid_argument("squeeze: mu must be >= 0");
  StateVector amps = state.amplitudes();
  const double signed_mu = static_cast<int>(sign) * mu;
  for (Eigen::Index k = 0; k < amps.size(); ++k) {
    const double m = state.magnetic_number(k);
    amps(k) *= std::polar(1.0, -signed_mu * m * m);
  }
  return make_unchecked(state.n_atoms(), std::move(amps));
}

/// Free evolution over the Ramsey dark period, exp(-i * phase * S_z) with phase = delta*T.
inline DickeState dark_evolve(const DickeState& state, double phase) {
  StateVector amps = state.amplitudes();
  detail::apply_z_phase(amps, state.n_atoms(), phase);
  return make_unchecked(state.n_atoms(), std::move(amps));
}

namespace detail {
inline void require_dims(const DickeState& state, const HermitianMatrix& op, const char* where) {
  if (op.rows() != state.dim() || op.cols() != state.dim()) {
    throw std::invalid_argument(std::string(where) + ": operator is " +
                                std::to_string(op.rows()) + "x" + std::to_string(op.cols()) +
                                ", state has dimension " + std::to_string(state.dim()));
  }
}
}  // namespace detail

inline double expect(const DickeState& state, const HermitianMatrix& op) {
  detail::require_dims(state, op, "expect");
  const Complex value = state.amplitudes().dot(op * state.amplitudes());
  if (std::abs(value.imag()) > kImagTolerance * (1.0 + std::abs(value.real()))) {
    throw std::invalid_argument("expect: operator is not Hermitian (Im<Op> = " +
                                std::to_string(value.imag()) + ")");
  }
  return value.real();
}

inline double std_dev(const DickeState& state, const HermitianMatrix& op) {
  detail::require_dims(state, op, "std_dev");
  const StateVector applied = op * state.amplitudes();
  const double mean = expect(state, op);
  // ||(Op - <Op>) psi|| avoids the cancellation in <Op^2> - <Op>^2.
  return (applied - mean * state.amplitudes()).norm();
}

/// Applies a collective spin component through the ladder couplings, O(N).
inline StateVector apply_spin(const DickeState& state, Axis axis) {
  const auto& a = state.amplitudes();
  const int n = state.n_atoms();
  StateVector out = StateVector::Zero(a.size());
  if (axis == Axis::z) {
    for (Eigen::Index k = 0; k < a.size(); ++k) out(k) = state.magnetic_number(k) * a(k);
    return out;
  }
  const Complex i{0.0, 1.0};
  for (Eigen::Index k = 0; k + 1 < a.size(); ++k) {
    const double b = 0.5 * detail::ladder(n, k);
    if (axis == Axis::x) {
      out(k) += b * a(k + 1);
      out(k + 1) += b * a(k);
    } else {
      out(k) += -i * b * a(k + 1);
      out(k + 1) += i * b * a(k);
    }
  }
  return out;
}

struct SpinMoments {
  double mean = 0.0;
  double std_dev = 0.0;
};

/// Mean and standard deviation of S_axis without forming dense matrices.
inline SpinMoments spin_moments(const DickeState& state, Axis axis) {
  const StateVector applied = apply_spin(state, axis);
  const double mean = state.amplitudes().dot(applied).real();
  return {mean, (applied - mean * state.amplitudes()).norm()};
}

inline double fidelity(const DickeState& a, const DickeState& b) {
  if (a.n_atoms() != b.n_atoms()) {
    throw std::invalid_argument("fidelity: N mismatch (" + std::to_string(a.n_atoms()) + " vs " +
                                std::to_string(b.n_atoms()) + ")");
  }
  return std::min(1.0, std::norm(a.amplitudes().dot(b.amplitudes())));
}

/// Builds a normalized superposition sum_j c_j |state_j>; used for closed-form cat states.
inline DickeState superpose(std::initializer_list<std::pair<Complex, DickeState>> terms) {
  if (terms.size() == 0) throw std::invalid_argument("superpose: no terms");
  const int n = terms.begin()->second.n_atoms();
  StateVector amps = StateVector::Zero(n + 1);
  for (const auto& [coeff, s] : terms) {
    if (s.n_atoms() != n) throw std::invalid_argument("superpose: N mismatch");
    amps += coeff * s.amplitudes();
  }
  const double norm = amps.norm();
  if (norm == 0.0) throw std::invalid_argument("superpose: terms cancel");
  amps /= norm;
  return make_unchecked(n, std::move(amps));
}

}  // namespace cptclock
