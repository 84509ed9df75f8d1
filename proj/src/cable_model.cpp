#include "tetherplan/cable_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tetherplan {
namespace {

constexpr double kScaleLower = 1e-6;
constexpr double kScaleUpper = 1e6;

// acosh(1 + w) without the cancellation in 1 + w for small w.
double acosh1p(double w) { return std::log1p(w + std::sqrt(w * (w + 2.0))); }

std::string describe(const PlanarConfiguration& cfg) {
  std::ostringstream os;
  os << "(p=" << cfg.p << ", H=" << cfg.H << ")";
  return os.str();
}

}  // namespace

const char* to_string(CableState state) noexcept {
  return state == CableState::Slack ? "slack" : "taut";
}

void CableProperties::validate() const {
  if (!(mass_per_length > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "cable mass per length must be positive");
  }
  if (!(gravity > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "gravity must be positive");
  }
  if (!(sag_limit >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "sag limit must be non-negative");
  }
  if (!std::isfinite(attachment_offset)) {
    throw Error(ErrorCode::InvalidArgument, "attachment offset must be finite");
  }
}

double CatenarySolution::height_at(double x) const {
  const double s = std::sinh(0.5 * x / a);
  return 2.0 * a * s * s;
}

double CableBounds::squared_violation() const {
  const double now2 = l_now * l_now;
  return std::max({l_min * l_min - now2, now2 - l_max * l_max, 0.0});
}

double chord_length(const PlanarConfiguration& cfg) { return std::hypot(cfg.p, cfg.H); }

CatenarySolution solve_catenary(const PlanarConfiguration& cfg, double length,
                                const CableProperties& props) {
  props.validate();
  if (!(cfg.p >= 0.0) || !std::isfinite(cfg.H)) {
    throw Error(ErrorCode::InvalidArgument, "invalid planar configuration " + describe(cfg));
  }
  const double chord = chord_length(cfg);
  if (!(length > chord)) {
    std::ostringstream os;
    os << "cable length " << length << " does not exceed chord " << chord << " for "
       << describe(cfg);
    throw Error(ErrorCode::LengthTooShort, os.str());
  }
  if (cfg.p < kDegenerateSpan) {
    throw Error(ErrorCode::DegenerateSpan, "vertical configuration " + describe(cfg));
  }

  // L^2 - H^2 = (2 a sinh(p / 2a))^2, the left side decreasing in a.
  const double target = std::sqrt((length - cfg.H) * (length + cfg.H));
  const double p = cfg.p;
  auto residual = [p, target](double a) { return 2.0 * a * std::sinh(0.5 * p / a) - target; };

  if (!(residual(kScaleLower) > 0.0) || !(residual(kScaleUpper) < 0.0)) {
    throw Error(ErrorCode::NoConvergence,
                "catenary scale outside [1e-6, 1e6] m for " + describe(cfg));
  }
  double a = 0.0;
  if (!bisect_positive(residual, kScaleLower, kScaleUpper, a)) {
    throw Error(ErrorCode::NoConvergence, "catenary bisection budget exhausted");
  }

  CatenarySolution sol;
  sol.a = a;
  sol.T0 = props.weight_per_length() * a;
  const double x_mid = a * std::atanh(cfg.H / length);
  sol.x_a = x_mid - 0.5 * p;
  sol.x_b = x_mid + 0.5 * p;
  sol.length = length;
  sol.state = (sol.x_a < 0.0 && sol.x_b > 0.0) ? CableState::Slack : CableState::Taut;
  return sol;
}

double min_length(const Vec3& p_droid, const Vec3& p_anchor) {
  return std::hypot(p_droid.x() - p_anchor.x(), p_droid.z() - p_anchor.z());
}

CatenarySolution max_length_catenary(const PlanarConfiguration& cfg, const CableProperties& props) {
  props.validate();
  if (cfg.p < kDegenerateSpan) {
    throw Error(ErrorCode::DegenerateSpan, "vertical configuration " + describe(cfg));
  }
  const double low_depth = props.sag_limit;
  const double high_depth = props.sag_limit + std::abs(cfg.H);
  if (high_depth == 0.0) {
    throw Error(ErrorCode::LengthTooShort, "zero sag and zero rise leave only the chord");
  }

  // Horizontal reach from the vertex to both endpoints must add up to p.
  const double p = cfg.p;
  auto reach = [&](double a) {
    return a * acosh1p(low_depth / a) + a * acosh1p(high_depth / a) - p;
  };
  constexpr double lo = 1e-12;
  constexpr double hi = 1e12;
  if (!(reach(lo) < 0.0) || !(reach(hi) > 0.0)) {
    throw Error(ErrorCode::NoConvergence, "sag-limited catenary not bracketed for " + describe(cfg));
  }
  double a = 0.0;
  if (!bisect_positive(reach, lo, hi, a)) {
    throw Error(ErrorCode::NoConvergence, "sag-limited catenary bisection budget exhausted");
  }

  const double x_low = a * acosh1p(low_depth / a);
  const double x_high = a * acosh1p(high_depth / a);
  CatenarySolution sol;
  sol.a = a;
  sol.T0 = props.weight_per_length() * a;
  if (cfg.H >= 0.0) {
    sol.x_a = -x_low;
    sol.x_b = x_high;
  } else {
    sol.x_a = -x_high;
    sol.x_b = x_low;
  }
  sol.length = a * (std::sinh(sol.x_b / a) - std::sinh(sol.x_a / a));
  sol.state = (sol.x_a < 0.0 && sol.x_b > 0.0) ? CableState::Slack : CableState::Taut;
  return sol;
}

double max_length(const PlanarConfiguration& cfg, const CableProperties& props) {
  props.validate();
  if (cfg.p < kDegenerateSpan) return std::abs(cfg.H) + props.sag_limit;
  if (props.sag_limit == 0.0 && cfg.H == 0.0) return cfg.p;
  return std::max(max_length_catenary(cfg, props).length, chord_length(cfg));
}

double tension_at(const CatenarySolution& sol, double x) {
  const double tol = 1e-12 * std::max({1.0, std::abs(sol.x_a), std::abs(sol.x_b)});
  if (x < sol.x_a - tol || x > sol.x_b + tol) {
    std::ostringstream os;
    os << "abscissa " << x << " outside [" << sol.x_a << ", " << sol.x_b << "]";
    throw Error(ErrorCode::OutOfDomain, os.str());
  }
  return sol.T0 * std::cosh(x / sol.a);
}

double tangent_angle(const CatenarySolution& sol, double x) {
  return std::atan(std::sinh(x / sol.a));
}

double max_sag_below_chord(const CatenarySolution& sol) {
  const double span = sol.span();
  if (!(span > 0.0)) return 0.0;
  const double slope = sol.rise() / span;
  // The chord is parallel to the tangent where sinh(x / a) equals its slope.
  const double x_star = std::clamp(sol.a * std::asinh(slope), sol.x_a, sol.x_b);
  const double chord_z = sol.height_at(sol.x_a) + slope * (x_star - sol.x_a);
  return std::max(0.0, chord_z - sol.height_at(x_star));
}

double sag_below_lower_endpoint(const CatenarySolution& sol) {
  if (sol.state != CableState::Slack) return 0.0;
  return std::min(sol.height_at(sol.x_a), sol.height_at(sol.x_b));
}

Vec3 attachment_point(const Vec3& p_droid, const CableProperties& props) {
  return p_droid + Vec3(0.0, 0.0, props.attachment_offset);
}

PlanarConfiguration planar_configuration(const Vec3& attach, const Vec3& anchor) {
  return {std::abs(anchor.x() - attach.x()), anchor.z() - attach.z()};
}

CableBounds cable_bounds(const Vec3& p_droid, const Vec3& p_anchor, double l_now,
                         const CableProperties& props) {
  const Vec3 attach = attachment_point(p_droid, props);
  CableBounds bounds;
  bounds.l_min = min_length(attach, p_anchor);
  bounds.l_max = max_length(planar_configuration(attach, p_anchor), props);
  bounds.l_now = l_now;
  return bounds;
}

std::vector<Vec2> sample_shape(const CatenarySolution& sol, int n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "shape sampling needs n >= 2");
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = (i == n - 1) ? sol.x_b : sol.x_a + sol.span() * i / (n - 1);
    pts.emplace_back(x, sol.height_at(x));
  }
  return pts;
}

std::vector<Vec3> sample_shape_world(const CatenarySolution& sol, int n, const Vec3& attach,
                                     const Vec3& anchor) {
  const double dir = anchor.x() >= attach.x() ? 1.0 : -1.0;
  const double z_a = sol.height_at(sol.x_a);
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(n));
  for (const Vec2& q : sample_shape(sol, n)) {
    out.emplace_back(attach.x() + dir * (q.x() - sol.x_a), attach.y(), attach.z() + q.y() - z_a);
  }
  return out;
}

double WinchSchedule::length_at(double t) const {
  return std::clamp(initial_length + payout_speed * t, stow_length, capacity);
}

double WinchSchedule::rate_at(double t) const {
  const double raw = initial_length + payout_speed * t;
  if (raw < stow_length || raw > capacity) return 0.0;
  if (raw == stow_length && payout_speed < 0.0) return 0.0;
  if (raw == capacity && payout_speed > 0.0) return 0.0;
  return payout_speed;
}

void WinchSchedule::validate() const {
  if (!(stow_length >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "winch stow length must be non-negative");
  }
  if (!(capacity >= stow_length)) {
    throw Error(ErrorCode::InvalidArgument, "winch capacity must not be below the stow length");
  }
  if (!(initial_length >= stow_length && initial_length <= capacity)) {
    throw Error(ErrorCode::InvalidArgument,
                "initial released length must lie within [stow length, capacity]");
  }
  if (!std::isfinite(payout_speed)) {
    throw Error(ErrorCode::InvalidArgument, "winch payout speed must be finite");
  }
}

}  // namespace tetherplan
