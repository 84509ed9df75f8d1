#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>

namespace tetherplan {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

inline constexpr double kStandardGravity = 9.81;

enum class ErrorCode {
  InvalidArgument,
  LengthTooShort,
  NoConvergence,
  OutOfDomain,
  DegenerateSpan,
  SingularSystem,
  DegenerateThrust,
  ParseError,
  ValidationError,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` tells callers what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Gravity vector in the ENU world frame (z up).
inline Vec3 gravity_vector(double g = kStandardGravity) { return Vec3(0.0, 0.0, -g); }

/// max(x, 0)^3
inline double hinge_cube(double violation) {
  return violation > 0.0 ? violation * violation * violation : 0.0;
}

/// d/dx of max(x, 0)^3
inline double hinge_cube_derivative(double violation) {
  return violation > 0.0 ? 3.0 * violation * violation : 0.0;
}

/// Bisection on a positive bracket [lo, hi] whose ends have opposite signs.
/// Splits geometrically while the bracket spans more than a factor of four,
/// arithmetically afterwards, and stops once the bracket cannot be split
/// further in double precision. Returns false when the budget runs out.
template <class F>
bool bisect_positive(F&& f, double lo, double hi, double& root, int max_iterations = 200) {
  double f_lo = f(lo);
  for (int it = 0; it < max_iterations; ++it) {
    const double mid = (hi > 4.0 * lo) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) {
      root = 0.5 * (lo + hi);
      return true;
    }
    const double f_mid = f(mid);
    if (f_mid == 0.0) {
      root = mid;
      return true;
    }
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return false;
}

}  // namespace tetherplan
