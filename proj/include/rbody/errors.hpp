#ifndef RBODY_ERRORS_HPP
#define RBODY_ERRORS_HPP

#include <array>
#include <stdexcept>
#include <string>

namespace rbody {

/// Malformed value handed to an operation (non-unit axis, non-SPD inertia, ...).
struct invalid_input : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Requested point lies outside the rotation-vector chart (alpha at or near pi).
struct chart_boundary_error : std::domain_error {
  std::array<double, 3> ambiguous_axis{0.0, 0.0, 0.0};
  explicit chart_boundary_error(const std::string& what) : std::domain_error(what) {}
  chart_boundary_error(const std::string& what, const std::array<double, 3>& axis)
      : std::domain_error(what), ambiguous_axis(axis) {}
};

/// Floating-point evaluation failed (overflow in finite differences, ...).
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Step control pushed the step size below the representable floor.
struct stiffness_error : numeric_error {
  using numeric_error::numeric_error;
};

/// Coordinate-change jacobian is numerically singular.
struct degenerate_map_error : numeric_error {
  using numeric_error::numeric_error;
};

}  // namespace rbody

#endif
