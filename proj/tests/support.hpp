// Helpers shared by the unit and acceptance tests.
#pragma once

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "cptclock/cptclock.hpp"

namespace testsupport {

struct CatPhase {
  int n = 0;
  double phi_a = 0.0;
  double phi_b = 0.0;
  int sign = 1;
};

inline std::vector<CatPhase> load_cat_phases() {
  const std::string path = std::string(CPTCLOCK_GOLDEN_DIR) + "/cat_phase.json";
  std::ifstream f(path);
  if (!f) throw std::runtime_error("missing golden file " + path);
  const auto doc = nlohmann::json::parse(f);
  std::vector<CatPhase> out;
  for (const auto& c : doc.at("cases")) {
    out.push_back({c.at("n").get<int>(), c.at("phi_a").get<double>(), c.at("phi_b").get<double>(),
                   c.at("sign").get<int>()});
  }
  return out;
}

/// (|pi/2, phi_a> + sign i |pi/2, phi_b>) / sqrt 2
inline cptclock::DickeState cat_state(const CatPhase& c, int sign) {
  using cptclock::Complex;
  const double half_pi = 0.5 * std::numbers::pi;
  return cptclock::superpose({{Complex(1.0, 0.0), cptclock::css(c.n, half_pi, c.phi_a)},
                              {Complex(0.0, sign), cptclock::css(c.n, half_pi, c.phi_b)}});
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace testsupport
