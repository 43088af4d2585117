// Flat-file output. Numbers are written with 17 significant digits so a
// fixed run produces byte-identical files.
#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cptclock/husimi.hpp"
#include "cptclock/lambda_cpt.hpp"
#include "cptclock/protocols.hpp"
#include "cptclock/sweep.hpp"

namespace cptclock::io {

inline std::string format_double(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string{};
}

inline std::vector<double> linspace(double start, double stop, std::size_t count) {
  if (count == 0) throw std::invalid_argument("linspace: count must be >= 1");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = start;
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  out.back() = stop;
  return out;
}

/// Parses "start:stop:count" into count evenly spaced points, endpoints
/// included. count == 1 yields {start}.
inline std::vector<double> parse_grid(std::string_view text) {
  const auto first = text.find(':');
  const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
  if (second == std::string_view::npos || text.find(':', second + 1) != std::string_view::npos) {
    throw std::invalid_argument("grid must look like start:stop:count, got '" + std::string(text) + "'");
  }
  auto number = [&](std::string_view part) {
    const std::string s(part);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) {
      throw std::invalid_argument("grid: bad number '" + s + "'");
    }
    return v;
  };
  const double start = number(text.substr(0, first));
  const double stop = number(text.substr(first + 1, second - first - 1));
  const auto count_text = text.substr(second + 1);
  long count = 0;
  const auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
  if (ec != std::errc{} || ptr != count_text.data() + count_text.size() || count < 1) {
    throw std::invalid_argument("grid: count must be a positive integer");
  }
  return linspace(start, stop, static_cast<std::size_t>(count));
}

inline void write_fringe_csv(std::ostream& os, const FringeScan& scan) {
  os << "delta_T_rad,expect,std_dev,slope,uncertainty_dT,undefined_flag\n";
  for (std::size_t i = 0; i < scan.phases.size(); ++i) {
    const auto& s = scan.stats[i];
    os << format_double(scan.phases[i]) << ',' << format_double(s.expect) << ','
       << format_double(s.std_dev) << ',' << format_double(s.slope) << ','
       << format_optional(s.uncertainty_dT) << ',' << (s.undefined() ? 1 : 0) << '\n';
  }
}

inline void write_trajectory_csv(std::ostream& os, const std::vector<lambda::TrajectoryPoint>& traj,
                                 const lambda::LambdaParams& params) {
  os << "time_s,pop_up,pop_e,pop_down,pop_dark,pop_bright,trace\n";
  for (const auto& pt : traj) {
    const auto& d = pt.density;
    os << format_double(pt.time) << ',' << format_double(d.population(lambda::kUp)) << ','
       << format_double(d.population(lambda::kExcited)) << ','
       << format_double(d.population(lambda::kDown)) << ','
       << format_double(lambda::dark_population(d, params)) << ','
       << format_double(lambda::bright_population(d, params)) << ',' << format_double(d.trace())
       << '\n';
  }
}

inline void write_qpd_csv(std::ostream& os, const QpdMap& map) {
  os << "theta_rad,phi_rad,q\n";
  for (std::size_t i = 0; i < map.grid.thetas.size(); ++i) {
    for (std::size_t j = 0; j < map.grid.phis.size(); ++j) {
      os << format_double(map.grid.thetas[i]) << ',' << format_double(map.grid.phis[j]) << ','
         << format_double(map.values[i][j]) << '\n';
    }
  }
}

inline void write_mu_sweep_csv(std::ostream& os, const std::vector<analysis::MuSweepRow>& rows) {
  os << "mu,pmf_closed_form,pmf_simulated,uncertainty_dT,undefined_flag\n";
  for (const auto& r : rows) {
    os << format_double(r.mu) << ',' << format_double(r.pmf_closed_form) << ','
       << format_double(r.pmf_simulated) << ',' << format_optional(r.uncertainty_dT) << ','
       << (r.uncertainty_dT ? 0 : 1) << '\n';
  }
}

}  // namespace cptclock::io
