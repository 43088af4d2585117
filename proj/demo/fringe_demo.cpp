// Compares the conventional Ramsey fringe with the squeezed protocols at a
// handful of phases and prints the phase uncertainty of each.
#include <cstdio>
#include <numbers>

#include "cptclock/cptclock.hpp"

int main() {
  using namespace cptclock;
  constexpr int n = 41;
  const ProtocolSpec specs[] = {
      build_spec(ProtocolKind::conventional, n),
      build_spec(ProtocolKind::scsp, n),
      build_spec(ProtocolKind::esp, n),
  };
  std::printf("%-14s %10s %12s %12s %14s\n", "protocol", "dT", "<S>", "slope", "N*Delta(dT)");
  for (const auto& spec : specs) {
    for (double dT : {0.0, 0.5 / n, std::numbers::pi / 2}) {
      const auto s = run_protocol(spec, dT);
      if (s.uncertainty_dT) {
        std::printf("%-14s %10.5f %12.5f %12.5f %14.5f\n", spec.label.c_str(), dT, s.expect, s.slope,
                    n * *s.uncertainty_dT);
      } else {
        std::printf("%-14s %10.5f %12.5f %12.5f %14s\n", spec.label.c_str(), dT, s.expect, s.slope,
                    "undefined");
      }
    }
  }
}
