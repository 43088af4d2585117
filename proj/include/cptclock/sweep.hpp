#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cptclock/analysis.hpp"
#include "cptclock/protocols.hpp"

namespace cptclock::analysis {

struct MuSweepRow {
  double mu = 0.0;
  double pmf_closed_form = 0.0;
  double pmf_simulated = 0.0;
  std::optional<double> uncertainty_dT;
};

/// Echo squeezing protocol at dT = 0 across a grid of twist strengths. The
/// simulated PMF is the finite-difference fringe slope divided by N/2.
inline std::vector<MuSweepRow> mu_sweep(int n_atoms, const std::vector<double>& mu_grid,
                                        SlopeOptions opts = {}) {
  if (mu_grid.empty()) throw std::invalid_argument("mu_sweep: empty grid");
  for (double mu : mu_grid) {
    if (!(mu >= 0.0 && mu <= 0.5 * std::numbers::pi)) {
      throw std::invalid_argument("mu_sweep: mu must lie in [0, pi/2]");
    }
  }
  std::vector<MuSweepRow> rows;
  rows.reserve(mu_grid.size());
  for (double mu : mu_grid) {
    const auto stats = run_protocol(build_spec(ProtocolKind::esp, n_atoms, mu), 0.0, opts);
    rows.push_back({mu, pmf_esp(n_atoms, mu), stats.slope / (0.5 * n_atoms), stats.uncertainty_dT});
  }
  return rows;
}

}  // namespace cptclock::analysis
