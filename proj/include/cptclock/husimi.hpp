// Husimi quasi-probability Q(theta, phi) = |<theta, phi|psi>|^2 on the Bloch sphere.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "cptclock/dicke.hpp"

namespace cptclock {

struct SphereGrid {
  std::vector<double> thetas;
  std::vector<double> phis;

  /// n_theta points over [0, pi] inclusive, n_phi points over [0, 2pi).
  static SphereGrid uniform(std::size_t n_theta = 181, std::size_t n_phi = 360) {
    if (n_theta < 2 || n_phi < 1) throw std::invalid_argument("SphereGrid: grid too small");
    SphereGrid g;
    for (std::size_t i = 0; i < n_theta; ++i) {
      g.thetas.push_back(std::numbers::pi * static_cast<double>(i) / static_cast<double>(n_theta - 1));
    }
    g.thetas.back() = std::numbers::pi;
    for (std::size_t j = 0; j < n_phi; ++j) {
      g.phis.push_back(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_phi));
    }
    return g;
  }

  void validate() const {
    auto increasing = [](const std::vector<double>& v) {
      return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
    };
    if (thetas.empty() || phis.empty()) throw std::invalid_argument("SphereGrid: empty axis");
    if (!increasing(thetas) || !increasing(phis)) {
      throw std::invalid_argument("SphereGrid: axes must be strictly increasing");
    }
    if (thetas.front() < 0.0 || thetas.back() > std::numbers::pi) {
      throw std::invalid_argument("SphereGrid: theta outside [0, pi]");
    }
    if (phis.front() < 0.0 || phis.back() >= 2.0 * std::numbers::pi) {
      throw std::invalid_argument("SphereGrid: phi outside [0, 2pi)");
    }
  }
};

/// overlap: raw fidelities in [0, 1]. measure: scaled by (N+1)/(4 pi) so the
/// values integrate to one over the sphere.
enum class QpdNormalization { overlap, measure };

struct QpdMap {
  SphereGrid grid;
  std::vector<std::vector<double>> values;  // [theta][phi]
  QpdNormalization normalization = QpdNormalization::overlap;

  double at(std::size_t i_theta, std::size_t j_phi) const { return values[i_theta][j_phi]; }
};

inline QpdMap husimi_qpd(const DickeState& state, SphereGrid grid,
                         QpdNormalization normalization = QpdNormalization::overlap) {
  grid.validate();
  const int n = state.n_atoms();
  const double scale =
      normalization == QpdNormalization::measure ? (n + 1.0) / (4.0 * std::numbers::pi) : 1.0;
  QpdMap map{std::move(grid), {}, normalization};
  map.values.assign(map.grid.thetas.size(), std::vector<double>(map.grid.phis.size()));
  const auto& psi = state.amplitudes();
  StateVector weighted(n + 1);
  for (std::size_t i = 0; i < map.grid.thetas.size(); ++i) {
    // <theta, phi|psi> = sum_k conj(a_k(theta)) e^{-i k phi} psi_k
    const auto ref = css(n, map.grid.thetas[i], 0.0);
    for (int k = 0; k <= n; ++k) weighted(k) = std::conj(ref[k]) * psi(k);
    for (std::size_t j = 0; j < map.grid.phis.size(); ++j) {
      const Complex step = std::polar(1.0, -map.grid.phis[j]);
      // Horner in e^{-i phi}.
      Complex sum = 0.0;
      for (int k = n; k >= 0; --k) sum = sum * step + weighted(k);
      map.values[i][j] = scale * std::norm(sum);
    }
  }
  return map;
}

/// Integral of the map over the sphere, trapezoid in theta and periodic
/// rectangle rule in phi (assumes a uniform phi grid).
inline double integrate(const QpdMap& map) {
  const auto& th = map.grid.thetas;
  const double dphi = 2.0 * std::numbers::pi / static_cast<double>(map.grid.phis.size());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < th.size(); ++i) {
    double ring_a = 0.0;
    double ring_b = 0.0;
    for (std::size_t j = 0; j < map.grid.phis.size(); ++j) {
      ring_a += map.values[i][j];
      ring_b += map.values[i + 1][j];
    }
    const double h = th[i + 1] - th[i];
    total += 0.5 * h * (ring_a * std::sin(th[i]) + ring_b * std::sin(th[i + 1])) * dphi;
  }
  return total;
}

struct Lobe {
  double theta = 0.0;
  double phi = 0.0;
  double value = 0.0;
};

/// Local maxima of the map, largest first. Neighbourhoods wrap in phi; the
/// pole rows count as single points.
inline std::vector<Lobe> find_lobes(const QpdMap& map, std::size_t max_lobes,
                                    double min_relative_height = 0.1) {
  const auto& v = map.values;
  const std::size_t nt = v.size();
  const std::size_t np = nt ? v.front().size() : 0;
  double global = 0.0;
  for (const auto& row : v) global = std::max(global, *std::max_element(row.begin(), row.end()));
  std::vector<Lobe> lobes;
  for (std::size_t i = 0; i < nt; ++i) {
    const bool pole = map.grid.thetas[i] < 1e-12 || map.grid.thetas[i] > std::numbers::pi - 1e-12;
    for (std::size_t j = 0; j < (pole ? 1 : np); ++j) {
      const double here = v[i][j];
      if (here < min_relative_height * global) continue;
      bool is_max = true;
      if (pole) {
        // Every phi on a pole row is the same point; compare with the adjacent ring.
        const std::size_t ring = i == 0 ? std::min<std::size_t>(1, nt - 1) : i - 1;
        for (std::size_t jj = 0; jj < np; ++jj) is_max = is_max && v[ring][jj] <= here;
      } else {
        for (int di = -1; di <= 1 && is_max; ++di) {
          const auto ii = static_cast<std::ptrdiff_t>(i) + di;
          if (ii < 0 || ii >= static_cast<std::ptrdiff_t>(nt)) continue;
          for (int dj = -1; dj <= 1; ++dj) {
            if (di == 0 && dj == 0) continue;
            const std::size_t jj = (j + np + dj) % np;
            if (v[ii][jj] > here) {
              is_max = false;
              break;
            }
          }
        }
      }
      if (is_max) lobes.push_back({map.grid.thetas[i], map.grid.phis[j], here});
    }
  }
  std::stable_sort(lobes.begin(), lobes.end(),
                   [](const Lobe& a, const Lobe& b) { return a.value > b.value; });
  if (lobes.size() > max_lobes) lobes.resize(max_lobes);
  return lobes;
}

}  // namespace cptclock
