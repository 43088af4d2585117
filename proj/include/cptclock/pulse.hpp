// Declarative clock pulse sequences.
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "cptclock/dicke.hpp"

namespace cptclock {

namespace step {

/// Idealized saturating CPT pulse: the atoms end up in the dark state css(N, pi/2, pi).
struct SaturatingCpt {};

struct Squeeze {
  double mu = 0.0;
  Twist sign = Twist::squeeze;
};

struct Rotate {
  Axis axis = Axis::x;
  double angle = 0.0;
};

/// Ramsey dark period; phase is delta*T in radians.
struct Dark {
  double phase = 0.0;
};

struct Measure {
  Axis observable = Axis::x;
};

}  // namespace step

using PulseStep =
    std::variant<step::SaturatingCpt, step::Squeeze, step::Rotate, step::Dark, step::Measure>;

inline std::string describe(const PulseStep& s) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, step::SaturatingCpt>) {
          return "SaturatingCPT";
        } else if constexpr (std::is_same_v<T, step::Squeeze>) {
          return "Squeeze(mu=" + std::to_string(v.mu) +
                 (v.sign == Twist::squeeze ? ",+1)" : ",-1)");
        } else if constexpr (std::is_same_v<T, step::Rotate>) {
          return std::string("Rotate(") + to_string(v.axis) + "," + std::to_string(v.angle) + ")";
        } else if constexpr (std::is_same_v<T, step::Dark>) {
          return "Dark(" + std::to_string(v.phase) + ")";
        } else {
          return std::string("Measure(S") + to_string(v.observable) + ")";
        }
      },
      s);
}

enum class ProtocolKind { conventional, scsp, generalized_scsp, esp };
enum class Parity { odd, even };

struct ProtocolSpec {
  int n_atoms = 1;
  std::vector<PulseStep> steps;
  std::string label;

  const step::Measure& measurement() const { return std::get<step::Measure>(steps.back()); }
};

/// Throws std::invalid_argument describing the first violated invariant.
inline void validate(const ProtocolSpec& spec) {
  if (spec.n_atoms < 1) throw std::invalid_argument("protocol: n_atoms must be >= 1");
  if (spec.steps.empty() || !std::holds_alternative<step::SaturatingCpt>(spec.steps.front())) {
    throw std::invalid_argument("protocol: first step must be SaturatingCPT");
  }
  int measures = 0;
  for (const auto& s : spec.steps) {
    if (const auto* sq = std::get_if<step::Squeeze>(&s)) {
      if (!(sq->mu >= 0.0 && sq->mu <= std::numbers::pi)) {
        throw std::invalid_argument("protocol: squeeze mu must lie in [0, pi]");
      }
    } else if (const auto* d = std::get_if<step::Dark>(&s)) {
      if (!std::isfinite(d->phase)) throw std::invalid_argument("protocol: dark phase not finite");
    } else if (const auto* r = std::get_if<step::Rotate>(&s)) {
      if (!std::isfinite(r->angle)) throw std::invalid_argument("protocol: rotation angle not finite");
    } else if (const auto* m = std::get_if<step::Measure>(&s)) {
      if (m->observable == Axis::z) throw std::invalid_argument("protocol: readout must be Sx or Sy");
      ++measures;
    }
  }
  if (measures != 1 || !std::holds_alternative<step::Measure>(spec.steps.back())) {
    throw std::invalid_argument("protocol: exactly one Measure step, and it must be last");
  }
}

}  // namespace cptclock
