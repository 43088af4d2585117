// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cptclock/cptclock.hpp"
#include "support.hpp"

namespace {

using namespace cptclock;
constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<double> phase_grid() { return io::linspace(0.0, 2.0 * kPi, 64); }

Outcome conventional_fringe() {
  double worst = 0.0;
  for (int n : {1, 2, 16, 41, 100}) {
    const auto spec = build_spec(ProtocolKind::conventional, n);
    for (double x : phase_grid()) {
      const auto m = measure(spec, x);
      worst = std::max({worst, std::abs(m.mean + 0.5 * n * std::cos(x)),
                        std::abs(m.std_dev - 0.5 * std::sqrt(n) * std::abs(std::sin(x)))});
    }
  }
  return {worst <= 1e-9, fmt("max deviation %.3g (tol 1e-9)", worst)};
}

Outcome scsp_odd_closed_forms() {
  double worst = 0.0;
  double worst_unc = 0.0;
  for (int n : {3, 5, 11, 41}) {
    const auto spec = build_spec(ProtocolKind::scsp, n);
    for (double x : phase_grid()) {
      const auto m = measure(spec, x);
      worst = std::max({worst, std::abs(m.mean + 0.5 * n * std::cos(n * x)),
                        std::abs(m.std_dev - 0.5 * n * std::abs(std::sin(n * x)))});
      // Away from fringe zeros: |sin(N x)| bounded below.
      if (std::abs(std::sin(n * x)) > 0.1) {
        const auto u = uncertainty(spec, x);
        worst_unc = std::max(worst_unc, u ? std::abs(*u * n - 1.0) : 1.0);
      }
    }
  }
  return {worst <= 1e-9 && worst_unc <= 1e-6,
          fmt("closed-form deviation %.3g (tol 1e-9), |N*dd*T - 1| %.3g (tol 1e-6)", worst, worst_unc)};
}

Outcome cat_states() {
  double worst = 1.0;
  int count = 0;
  for (const auto& c : testsupport::load_cat_phases()) {
    if (c.n < 4) continue;
    const auto s = squeeze(css(c.n, 0.5 * kPi, kPi), 0.5 * kPi);
    worst = std::min(worst, fidelity(s, testsupport::cat_state(c, c.sign)));
    ++count;
  }
  return {count == 97 && worst >= 1.0 - 1e-10,
          fmt("N = 4..100 (%g states), min fidelity 1 - %.3g (tol 1e-10)", count, 1.0 - worst)};
}

Outcome even_n_under_odd_sequence() {
  bool ok = true;
  std::ostringstream detail;
  for (int n : {20, 40, 100}) {
    const auto spec = build_spec(ProtocolKind::scsp, n);
    const double slope = std::abs(run_protocol(spec, 0.0).slope);
    // Small-detuning fringe frequency from the curvature of A cos(w x).
    const double h = 1e-3;
    const double f0 = measure(spec, 0.0).mean;
    const double curvature = (measure(spec, h).mean - 2.0 * f0 + measure(spec, -h).mean) / (h * h);
    const double freq = std::sqrt(-curvature / f0);
    const double rel = std::abs(freq / std::sqrt(n) - 1.0);
    ok = ok && slope < 1e-9 && rel <= 0.10;
    detail << fmt("N=%g slope %.2g freq/sqrtN-1 %.3f; ", n, slope, rel);
  }
  const int n = 20;
  const auto avg = parity_average(ProtocolKind::scsp, n, std::nullopt, 0.01 / n);
  const double expected = 1.0 / std::sqrt(0.5 * (n * n + n));
  const double rel = avg.uncertainty_dT ? std::abs(*avg.uncertainty_dT / expected - 1.0) : 1.0;
  ok = ok && rel <= 0.05;
  detail << fmt("parity-averaged rel dev %.4f (tol 0.05)", rel);
  return {ok, detail.str()};
}

Outcome esp_figures_of_merit() {
  bool ok = true;
  std::ostringstream detail;
  double slope_rel = 0.0;
  double noise_dev = 0.0;
  for (int n : {5, 41, 100}) {
    for (double mu : {0.05, 0.1, analysis::optimal_mu(n), 0.3}) {
      const auto spec = build_spec(ProtocolKind::esp, n, mu);
      const auto r = run_protocol(spec, 0.0);
      const double law = 0.5 * n * analysis::pmf_esp(n, mu);
      slope_rel = std::max(slope_rel, std::abs(r.slope / law - 1.0));
      noise_dev = std::max(noise_dev, std::abs(r.std_dev - 0.5 * std::sqrt(n)));
    }
  }
  ok = slope_rel <= 1e-6 && noise_dev <= 1e-9;
  detail << fmt("slope rel %.3g, noise dev %.3g; ", slope_rel, noise_dev);

  const int n = 41;
  const auto grid = io::linspace(0.0, 0.5 * kPi, 721);
  const auto rows = analysis::mu_sweep(n, grid);
  const auto best = std::max_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.pmf_simulated < b.pmf_simulated;
  });
  const double spacing = grid[1] - grid[0];
  const double mu_err = std::abs(best->mu - analysis::optimal_mu(n));
  ok = ok && mu_err <= spacing;
  detail << fmt("mu* error %.3g (grid %.3g); ", mu_err, spacing);

  for (int m : {100, 400, 1000}) {
    const auto u = uncertainty(build_spec(ProtocolKind::esp, m), 0.0);
    const double rel = u ? std::abs(*u * m / std::sqrt(std::numbers::e) - 1.0) : 1.0;
    ok = ok && rel <= 0.03;
    detail << fmt("N=%g dd*T*N/sqrt(e)-1 %.4f; ", m, rel);
  }
  return {ok, detail.str()};
}

Outcome fringe_periods() {
  const int n = 41;
  const auto esp = build_spec(ProtocolKind::esp, n);
  const auto conv = build_spec(ProtocolKind::conventional, n);
  double esp_pi = 0.0;
  double conv_2pi = 0.0;
  double conv_pi = 0.0;
  for (double x : io::linspace(0.0, 2.0 * kPi, 256)) {
    esp_pi = std::max(esp_pi, std::abs(measure(esp, x).mean - measure(esp, x + kPi).mean));
    conv_2pi = std::max(conv_2pi, std::abs(measure(conv, x).mean - measure(conv, x + 2.0 * kPi).mean));
    conv_pi = std::max(conv_pi, std::abs(measure(conv, x).mean - measure(conv, x + kPi).mean));
  }
  return {esp_pi < 1e-9 && conv_2pi < 1e-9 && conv_pi > 1.0,
          fmt("ESP |f(x)-f(x+pi)| %.3g, conventional |f(x)-f(x+2pi)| %.3g, |f(x)-f(x+pi)| %.3g", esp_pi,
              conv_2pi, conv_pi)};
}

Outcome wrong_axis_null() {
  double worst = 0.0;
  double right = 1e300;
  for (int n : {5, 41, 100}) {
    const auto spec = build_spec(ProtocolKind::esp, n);
    worst = std::max(worst, std::abs(run_protocol(with_auxiliary_axis(spec, Axis::y), 0.0).slope));
    right = std::min(right, std::abs(run_protocol(spec, 0.0).slope));
  }
  return {worst < 1e-9 && right > 1.0, fmt("wrong-axis |slope| %.3g, right-axis |slope| >= %.3g", worst, right)};
}

Outcome oracle_equivalence() {
  const auto s = oracle::run_check(6, 50, 8, oracle::kDefaultSeed, 1e-10);
  return {s.pass() && s.cases == 300,
          fmt("%g cases, max diff %.3g, min symmetric weight %.15g", s.cases, s.max_abs_diff,
              s.min_symmetric_weight)};
}

Outcome lambda_system() {
  using namespace cptclock::lambda;
  const LambdaParams p;
  const auto dark = LambdaDensity::pure(dark_bright(p).dark);
  double excited = 0.0;
  for (const auto& pt : evolve(p, dark, 2e-6)) excited = std::max(excited, pt.density.population(kExcited));
  double trace_dev = 0.0;
  for (const auto& pt : evolve(p, LambdaDensity::basis(kUp), 5e-6)) {
    trace_dev = std::max(trace_dev, std::abs(pt.density.trace() - 1.0));
  }
  const double rule = pumping_time_estimate(p.rabi_up, p.gamma);
  const double t = pumping_time(p).time;
  const double ratio = t / rule;
  const bool pump_ok = ratio >= 0.5 && ratio <= 2.0;
  return {excited < 1e-12 && trace_dev <= 1e-8 && pump_ok,
          fmt("dark excited pop %.3g, trace dev %.3g, ", excited, trace_dev) +
              fmt("pumping time %.4g s vs %.3g s (ratio %.3f, band [0.5, 2])", t, rule, ratio)};
}

Outcome excess_noise_arithmetic() {
  const double n = 5e6;
  const double excess = 25.0 * std::sqrt(n);
  const double conventional = analysis::excess_sensitivity(1.0, 0.5 * std::sqrt(n), excess, n);
  const double pmf = analysis::pmf_esp(n, analysis::optimal_mu(n));
  const double esp = analysis::excess_sensitivity(pmf, 0.5 * std::sqrt(n), excess, n);
  const bool ok = std::abs(conventional / 45.0 - 1.0) <= 0.01 && std::abs(pmf / 1356.0 - 1.0) <= 0.005 &&
                  std::abs(esp / 6.1e4 - 1.0) <= 0.01;
  return {ok, fmt("sensitivity %.4g (45), PMF %.5g (1356), ESP sensitivity %.4g (6.1e4)", conventional,
                  pmf, esp)};
}

Outcome generalized_plateau() {
  const int n = 128;
  const double lo = 4.0 * std::sqrt(2.0 / n);
  const double hi = 0.5 * kPi - std::sqrt(2.0 / n);
  const double bound = std::numbers::sqrt2 * 1.15;
  double worst = 0.0;
  for (double mu : io::linspace(lo, hi, 16)) {
    const auto spec = build_spec(ProtocolKind::generalized_scsp, n, mu, Parity::even);
    const auto u = uncertainty(spec, 1e-4);
    worst = std::max(worst, u ? *u * n : 1e300);
  }
  return {worst <= bound,
          fmt("max N*dd*T %.4f over mu in [%.3f, %.3f]", worst, lo, hi) + fmt(" (bound %.4f)", bound)};
}

bool near_cell(const Lobe& l, double theta, double phi, const SphereGrid& g) {
  const double dt = g.thetas[1] - g.thetas[0];
  const double dp = g.phis.size() > 1 ? g.phis[1] - g.phis[0] : 2.0 * kPi;
  const bool pole = theta == 0.0 || theta == kPi;
  double dphi = std::abs(l.phi - phi);
  dphi = std::min(dphi, 2.0 * kPi - dphi);
  return std::abs(l.theta - theta) <= dt + 1e-12 && (pole || dphi <= dp + 1e-12);
}

Outcome husimi_panels() {
  const int n = 21;
  const auto grid = SphereGrid::uniform(181, 360);
  const auto spec = build_spec(ProtocolKind::scsp, n);
  const auto pumped = css(n, 0.5 * kPi, kPi);
  const auto y_cat = apply_step(pumped, spec.steps[1]);
  const auto z_cat = apply_step(y_cat, spec.steps[2]);

  const auto b1 = find_lobes(husimi_qpd(pumped, grid), 2);
  const bool ok1 = b1.size() == 1 && near_cell(b1[0], 0.5 * kPi, kPi, grid);

  auto two_lobes = [&](const DickeState& s, double t1, double p1, double t2, double p2) {
    const auto lobes = find_lobes(husimi_qpd(s, grid), 3);
    if (lobes.size() != 2) return false;
    return (near_cell(lobes[0], t1, p1, grid) && near_cell(lobes[1], t2, p2, grid)) ||
           (near_cell(lobes[0], t2, p2, grid) && near_cell(lobes[1], t1, p1, grid));
  };
  const bool ok3 = two_lobes(y_cat, 0.5 * kPi, 0.5 * kPi, 0.5 * kPi, 1.5 * kPi);
  const bool ok4 = two_lobes(z_cat, 0.0, 0.0, kPi, 0.0);
  return {ok1 && ok3 && ok4, std::string("CSS lobe ") + (ok1 ? "ok" : "wrong") + ", y-cat lobes " +
                                 (ok3 ? "ok" : "wrong") + ", z-cat lobes " + (ok4 ? "ok" : "wrong")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"conventional fringe signal and noise", conventional_fringe},
      {"SCSP odd-N closed forms and Heisenberg scaling", scsp_odd_closed_forms},
      {"cat-state generation", cat_states},
      {"even N under the odd-optimized SCSP", even_n_under_odd_sequence},
      {"ESP slope, noise, optimum and sensitivity", esp_figures_of_merit},
      {"ESP and conventional fringe periods", fringe_periods},
      {"wrong auxiliary axis gives no signal", wrong_axis_null},
      {"Dicke simulator vs product-space oracle", oracle_equivalence},
      {"Lambda system dark state, trace and pumping time", lambda_system},
      {"excess-noise sensitivity arithmetic", excess_noise_arithmetic},
      {"generalized-mu plateau", generalized_plateau},
      {"Husimi lobe locations", husimi_panels},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s [%2d] %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
