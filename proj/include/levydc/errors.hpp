#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace levydc {

// Argument outside the mathematical domain of an operation (r <= 0, t <= 0, u outside (0,1)...).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Measure cannot support the requested construction (zero tails, plateaus in the tail).
class degenerate_model_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A moment or compensator integral diverges.
class integrability_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Root search failed to bracket a sign change.
class bracket_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two paths compared pathwise were not driven by the same trajectory noise.
class coupling_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class divergence_error : public std::runtime_error {
 public:
  divergence_error(std::size_t step, double time, double value)
      : std::runtime_error("Euler state diverged at step " + std::to_string(step) +
                           " (t=" + std::to_string(time) + ", x=" + std::to_string(value) + ")"),
        step_(step),
        time_(time) {}

  std::size_t step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  std::size_t step_;
  double time_;
};

}  // namespace levydc
