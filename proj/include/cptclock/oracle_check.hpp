// Randomized equivalence check between the Dicke simulator and the
// product-space oracle.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cptclock/protocols.hpp"
#include "cptclock/tensor_oracle.hpp"

namespace cptclock::oracle {

inline constexpr std::uint64_t kDefaultSeed = 20220418;

/// Uniform double in [0, 1) from the top 53 bits; independent of the
/// standard library's distribution implementations.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct RandomCase {
  int n_atoms = 1;
  double theta = 0.0;
  double phi = 0.0;
  std::vector<PulseStep> steps;
};

/// Random start CSS plus up to max_steps squeeze/rotate/dark steps. Angles
/// are uniform in [0, 2pi), twist strengths uniform in [0, pi].
inline RandomCase random_case(std::mt19937_64& rng, int n_atoms, int max_steps) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  RandomCase c;
  c.n_atoms = n_atoms;
  c.theta = std::numbers::pi * unit_uniform(rng);
  c.phi = two_pi * unit_uniform(rng);
  const int count = static_cast<int>(unit_uniform(rng) * (max_steps + 1));
  for (int i = 0; i < count; ++i) {
    const int kind = static_cast<int>(unit_uniform(rng) * 3.0);
    if (kind == 0) {
      const double mu = std::numbers::pi * unit_uniform(rng);
      const Twist sign = unit_uniform(rng) < 0.5 ? Twist::squeeze : Twist::unsqueeze;
      c.steps.emplace_back(step::Squeeze{mu, sign});
    } else if (kind == 1) {
      const int a = static_cast<int>(unit_uniform(rng) * 3.0);
      const Axis axis = a == 0 ? Axis::x : (a == 1 ? Axis::y : Axis::z);
      c.steps.emplace_back(step::Rotate{axis, two_pi * unit_uniform(rng)});
    } else {
      c.steps.emplace_back(step::Dark{two_pi * unit_uniform(rng)});
    }
  }
  return c;
}

struct CaseResult {
  int n_atoms = 0;
  std::size_t steps = 0;
  double max_abs_diff = 0.0;
  double symmetric_weight = 1.0;
};

inline CaseResult compare_case(const RandomCase& c) {
  DickeState dicke = css(c.n_atoms, c.theta, c.phi);
  ProductState product = oracle_css(c.n_atoms, c.theta, c.phi);
  for (const auto& s : c.steps) {
    dicke = apply_step(dicke, s);
    product = oracle_apply(std::move(product), s);
  }
  CaseResult r{c.n_atoms, c.steps.size(), 0.0, symmetric_weight(product)};
  for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
    const auto d = spin_moments(dicke, axis);
    const auto o = oracle_measure(product, axis);
    r.max_abs_diff = std::max({r.max_abs_diff, std::abs(d.mean - o.expect),
                               std::abs(d.std_dev - o.std_dev)});
  }
  return r;
}

struct CheckSummary {
  std::uint64_t seed = kDefaultSeed;
  int cases = 0;
  double max_abs_diff = 0.0;
  double min_symmetric_weight = 1.0;
  double tolerance = 1e-10;
  std::vector<CaseResult> failures;

  bool pass() const { return failures.empty(); }
};

/// `sequences` random cases for every N in [1, max_atoms].
inline CheckSummary run_check(int max_atoms = 6, int sequences = 50, int max_steps = 8,
                              std::uint64_t seed = kDefaultSeed, double tolerance = 1e-10) {
  if (max_atoms < 1 || max_atoms > kMaxAtoms) {
    throw std::invalid_argument("oracle check: max_atoms must lie in [1, " +
                                std::to_string(kMaxAtoms) + "]");
  }
  if (sequences < 1 || max_steps < 0) throw std::invalid_argument("oracle check: bad counts");
  CheckSummary summary;
  summary.seed = seed;
  summary.tolerance = tolerance;
  std::mt19937_64 rng(seed);
  for (int n = 1; n <= max_atoms; ++n) {
    for (int i = 0; i < sequences; ++i) {
      const auto r = compare_case(random_case(rng, n, max_steps));
      ++summary.cases;
      summary.max_abs_diff = std::max(summary.max_abs_diff, r.max_abs_diff);
      summary.min_symmetric_weight = std::min(summary.min_symmetric_weight, r.symmetric_weight);
      if (!(r.max_abs_diff <= tolerance) || std::abs(r.symmetric_weight - 1.0) > 1e-12) {
        summary.failures.push_back(r);
      }
    }
  }
  return summary;
}

}  // namespace cptclock::oracle
