#ifndef BIWAVE_ERRORS_HPP
#define BIWAVE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace biwave {

/// Field/operator shape disagreement (grid or component count).
class ShapeMismatch : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Vector too close to the origin to be retracted onto the sphere.
class DegenerateVector : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A field that must be sphere-valued is not, beyond the stated tolerance.
class OffSphere : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Plane vectors handed to a generator are not orthonormal.
class NonOrthonormalPlane : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Non-finite value produced during time stepping; carries the failure time.
class NonFinite : public std::runtime_error {
  public:
    NonFinite(double t, const std::string& what)
        : std::runtime_error(what), t_failure_(t) {}
    double time_of_failure() const { return t_failure_; }

  private:
    double t_failure_;
};

/// Time step exceeds the stability budget of an explicit scheme.
class StabilityViolation : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Configuration file problem; carries the offending line number (0 = none).
class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "config error at line " + std::to_string(line) + ": " + what
                                      : "config error: " + what),
          line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

}  // namespace biwave

#endif
