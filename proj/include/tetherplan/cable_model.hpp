#pragma once

// Planar catenary statics for the tether between the end droid (endpoint A)
// and the payload drone (endpoint B), plus the admissible cable-length
// corridor derived from it.
//
// All catenary quantities live in the vertex-origin frame: the curve is
// z(x) = a (cosh(x / a) - 1) with the vertex at the origin, A at x_a and
// B at x_b = x_a + p.

#include "tetherplan/common.hpp"

#include <vector>

namespace tetherplan {

struct CableProperties {
  double mass_per_length = 1.4e-4;  // kg/m
  double gravity = kStandardGravity;  // m/s^2
  double sag_limit = 0.1;             // m, vertex depth below the lower endpoint
  double attachment_offset = 0.0;     // m, vertical protrusion above the end droid

  /// Weight per unit length (N/m).
  double weight_per_length() const { return mass_per_length * gravity; }

  void validate() const;
};

/// Relative placement of the two attachment points in the cable plane.
struct PlanarConfiguration {
  double p = 0.0;  // horizontal separation, >= 0
  double H = 0.0;  // z_B - z_A
};

enum class CableState { Taut, Slack };

const char* to_string(CableState state) noexcept;

struct CatenarySolution {
  double a = 0.0;   // scale parameter T0 / mu
  double T0 = 0.0;  // tension at the vertex
  double x_a = 0.0;
  double x_b = 0.0;
  CableState state = CableState::Taut;
  double length = 0.0;

  /// Height above the vertex at abscissa x.
  double height_at(double x) const;
  double span() const { return x_b - x_a; }
  double rise() const { return height_at(x_b) - height_at(x_a); }
};

struct CableBounds {
  double l_min = 0.0;
  double l_max = 0.0;
  double l_now = 0.0;

  bool satisfied() const { return l_min <= l_now && l_now <= l_max; }
  /// Largest corridor violation in squared-length units (0 when satisfied).
  double squared_violation() const;
};

/// Horizontal spans below this are treated as a vertical cable.
inline constexpr double kDegenerateSpan = 1e-6;

double chord_length(const PlanarConfiguration& cfg);

/// Catenary of total length `length` through both endpoints.
/// Throws LengthTooShort when length <= chord, DegenerateSpan when p is below
/// kDegenerateSpan and NoConvergence when the scale leaves [1e-6, 1e6] m.
CatenarySolution solve_catenary(const PlanarConfiguration& cfg, double length,
                                const CableProperties& props);

/// Straight-line distance between the two points projected on the x-z plane.
double min_length(const Vec3& p_droid, const Vec3& p_anchor);

/// Length of the catenary whose vertex sits `sag_limit` below the lower endpoint.
double max_length(const PlanarConfiguration& cfg, const CableProperties& props);

/// The catenary behind max_length(). Requires p >= kDegenerateSpan.
CatenarySolution max_length_catenary(const PlanarConfiguration& cfg, const CableProperties& props);

/// Tension magnitude T0 cosh(x / a); OutOfDomain outside [x_a, x_b].
double tension_at(const CatenarySolution& sol, double x);

/// Tangent angle of the cable at abscissa x (tan(theta) = sinh(x / a)).
double tangent_angle(const CatenarySolution& sol, double x);

/// Deepest point of the cable below the straight chord.
double max_sag_below_chord(const CatenarySolution& sol);

/// Depth of the vertex below the lower endpoint; zero for a taut cable.
double sag_below_lower_endpoint(const CatenarySolution& sol);

/// Attachment point of the cable on the end droid.
Vec3 attachment_point(const Vec3& p_droid, const CableProperties& props);

/// Planar configuration between an attachment point (A) and the anchor (B).
PlanarConfiguration planar_configuration(const Vec3& attach, const Vec3& anchor);

CableBounds cable_bounds(const Vec3& p_droid, const Vec3& p_anchor, double l_now,
                         const CableProperties& props);

/// n points of the curve in the vertex frame, x evenly spaced over [x_a, x_b].
std::vector<Vec2> sample_shape(const CatenarySolution& sol, int n);

/// Same samples placed in the world: A at `attach`, B towards `anchor`.
std::vector<Vec3> sample_shape_world(const CatenarySolution& sol, int n, const Vec3& attach,
                                     const Vec3& anchor);

/// Kinematic winch: released length grows linearly and is clipped to
/// [stow_length, capacity].
struct WinchSchedule {
  double initial_length = 1.0;  // m
  double payout_speed = 0.2;    // m/s, negative while retrieving
  double capacity = 20.0;       // m of cable on the reel
  double stow_length = 0.3;     // m, retrieval stops here

  double length_at(double t) const;
  /// d(length_at)/dt; zero while clipped.
  double rate_at(double t) const;
  void validate() const;
};

}  // namespace tetherplan
