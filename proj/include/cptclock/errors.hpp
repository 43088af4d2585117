#pragma once

#include <stdexcept>
#include <string>

namespace cptclock {

/// Raised when a request exceeds a hard size cap (e.g. the product-space oracle).
class ResourceLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// The adaptive integrator could not make progress.
class IntegratorFailure : public std::runtime_error {
 public:
  IntegratorFailure(const std::string& what, double time, double step)
      : std::runtime_error(what + " (t=" + std::to_string(time) +
                           " s, dt=" + std::to_string(step) + " s)"),
        time_(time),
        step_(step) {}

  double time() const noexcept { return time_; }
  double step() const noexcept { return step_; }

 private:
  double time_;
  double step_;
};

/// A threshold crossing was not observed within the integration horizon.
class NotReachedError : public std::runtime_error {
 public:
  NotReachedError(const std::string& what, double final_population)
      : std::runtime_error(what), final_population_(final_population) {}

  double final_population() const noexcept { return final_population_; }

 private:
  double final_population_;
};

}  // namespace cptclock
