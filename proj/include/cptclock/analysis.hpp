// Closed-form figures of merit for the squeezed CPT clock protocols.
//
// Sensitivities are (delta*T)^-1 in units where the conventional clock
// limited by projection noise scores sqrt(N).
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace cptclock::analysis {

struct SensitivityReport {
  double pmf = 0.0;
  double qpn_noise = 0.0;
  double excess_noise = 0.0;
  double sensitivity = 0.0;
  double sql_ref = 0.0;
  double heisenberg_ref = 0.0;
};

struct ReferenceLimits {
  double sql = 0.0;
  double heisenberg = 0.0;
};

/// Phase magnification of the echo squeezing protocol at zero detuning:
/// (N-1) sin(mu) cos^(N-2)(mu).
inline double pmf_esp(double n_atoms, double mu) {
  if (n_atoms < 2) throw std::invalid_argument("pmf_esp: N must be >= 2");
  return (n_atoms - 1.0) * std::sin(mu) * std::pow(std::cos(mu), n_atoms - 2.0);
}

/// arccot(sqrt(N-2)), the maximizer of pmf_esp.
inline double optimal_mu(double n_atoms) {
  if (n_atoms < 3) {
    throw std::invalid_argument("optimal_mu: N must be >= 3 (got " + std::to_string(n_atoms) + ")");
  }
  return std::atan(1.0 / std::sqrt(n_atoms - 2.0));
}

inline ReferenceLimits reference_limits(double n_atoms) {
  if (n_atoms < 1) throw std::invalid_argument("reference_limits: N must be >= 1");
  return {std::sqrt(n_atoms), n_atoms};
}

/// (N/2) * pmf / sqrt(qpn^2 + excess^2). With pmf = 1 and qpn = sqrt(N)/2
/// this is the standard quantum limit sqrt(N).
inline double excess_sensitivity(double pmf, double qpn_noise, double excess_noise,
                                 double n_atoms) {
  if (qpn_noise < 0.0 || excess_noise < 0.0) {
    throw std::invalid_argument("excess_sensitivity: noises must be >= 0");
  }
  const double denom = std::hypot(qpn_noise, excess_noise);
  if (denom == 0.0) throw std::invalid_argument("excess_sensitivity: total noise is zero");
  return 0.5 * n_atoms * pmf / denom;
}

inline SensitivityReport make_report(double pmf, double qpn_noise, double excess_noise,
                                     double n_atoms) {
  const auto limits = reference_limits(n_atoms);
  return {pmf,
          qpn_noise,
          excess_noise,
          excess_sensitivity(pmf, qpn_noise, excess_noise, n_atoms),
          limits.sql,
          limits.heisenberg};
}

}  // namespace cptclock::analysis
