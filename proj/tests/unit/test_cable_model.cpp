#include "tetherplan/cable_model.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace tetherplan;
using doctest::Approx;

namespace {

double arc_length_by_quadrature(const CatenarySolution& s) {
  return oracle::simpson(
      [&](double x) {
        const double slope = std::sinh(x / s.a);
        return std::sqrt(1.0 + slope * slope);
      },
      s.x_a, s.x_b, 4000);
}

CableProperties table_cable() {
  CableProperties c;
  c.mass_per_length = 1.4e-4;
  c.sag_limit = 0.1;
  return c;
}

}  // namespace

TEST_CASE("weight per length is mass per length times gravity") {
  const CableProperties c = table_cable();
  CHECK(c.weight_per_length() == 1.4e-4 * 9.81);
  CHECK(c.weight_per_length() == Approx(1.3734e-3).epsilon(1e-12));
}

TEST_CASE("chord length") {
  CHECK(chord_length({2.0, 0.0}) == 2.0);
  CHECK(chord_length({0.0, 3.0}) == 3.0);
  CHECK(chord_length({2.0, 1.0}) == Approx(std::sqrt(5.0)).epsilon(1e-15));
}

TEST_CASE("nearly taut cable has negligible sag") {
  const CatenarySolution s = solve_catenary({2.0, 0.0}, 2.0000001, table_cable());
  CHECK(max_sag_below_chord(s) < 1e-3);
  CHECK(s.state == CableState::Slack);
}

TEST_CASE("symmetric catenary matches bisection and quadrature") {
  const CatenarySolution s = solve_catenary({2.0, 0.0}, 2.5, table_cable());
  const double a_ref =
      oracle::bisect([](double a) { return 2.0 * a * std::sinh(1.0 / a) - 2.5; }, 0.1, 100.0);
  CHECK(s.a == Approx(a_ref).epsilon(1e-9));
  CHECK(s.x_a == Approx(-1.0).epsilon(1e-9));
  CHECK(s.x_b == Approx(1.0).epsilon(1e-9));
  CHECK(arc_length_by_quadrature(s) == Approx(2.5).epsilon(1e-6));
  CHECK(s.T0 == Approx(s.a * table_cable().weight_per_length()).epsilon(1e-15));
}

TEST_CASE("asymmetric catenary satisfies both endpoint equations") {
  const CatenarySolution s = solve_catenary({2.0, 1.0}, 2.4, table_cable());
  CHECK(std::abs(s.span() - 2.0) < 1e-9);
  CHECK(std::abs(s.rise() - 1.0) < 1e-9);
  CHECK(std::abs(s.a * (std::sinh(s.x_b / s.a) - std::sinh(s.x_a / s.a)) - 2.4) < 1e-9 * 2.4);
  CHECK(s.a == Approx(oracle::catenary_scale(2.0, 1.0, 2.4)).epsilon(1e-9));
}

TEST_CASE("solve_catenary rejects lengths at or below the chord and vertical spans") {
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code_of([] { solve_catenary({3.0, 4.0}, 5.0, table_cable()); }) ==
        ErrorCode::LengthTooShort);
  CHECK(code_of([] { solve_catenary({3.0, 4.0}, 4.9, table_cable()); }) ==
        ErrorCode::LengthTooShort);
  CHECK(code_of([] { solve_catenary({0.0, 2.0}, 2.5, table_cable()); }) ==
        ErrorCode::DegenerateSpan);
}

TEST_CASE("min_length uses the x-z projection") {
  CHECK(min_length({2, 0, 0}, {0, 0, 0}) == 2.0);
  CHECK(min_length({2, 0, 2}, {0, 0, 0}) == Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(min_length({0, 5, 0}, {0, 0, 0}) == 0.0);
}

TEST_CASE("max_length") {
  CableProperties c = table_cable();
  CHECK(max_length({0.0, 3.0}, c) == Approx(3.1).epsilon(1e-15));
  c.sag_limit = 0.0;
  CHECK(max_length({2.0, 0.0}, c) == Approx(2.0).epsilon(1e-12));

  c.sag_limit = 0.1;
  const double a =
      oracle::bisect([](double a) { return a * (std::cosh(1.0 / a) - 1.0) - 0.1; }, 0.1, 100.0);
  const double expected = 2.0 * a * std::sinh(1.0 / a);
  const double got = max_length({2.0, 0.0}, c);
  CHECK(got == Approx(expected).epsilon(1e-9));
  const CatenarySolution s = max_length_catenary({2.0, 0.0}, c);
  CHECK(arc_length_by_quadrature(s) == Approx(got).epsilon(1e-6));
  CHECK(sag_below_lower_endpoint(s) == Approx(0.1).epsilon(1e-9));
}

TEST_CASE("tension along the cable") {
  const CableProperties c = table_cable();
  const CatenarySolution s = solve_catenary({2.0, 0.0}, 2.5, c);
  CHECK(tension_at(s, 0.0) == Approx(s.T0).epsilon(1e-15));
  const double x45 = s.a * std::asinh(1.0);
  CHECK(tension_at(s, x45) == Approx(s.T0 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(tangent_angle(s, x45) == Approx(M_PI / 4).epsilon(1e-12));

  // Vertical balance of the slack cable: both endpoint supports carry its weight.
  const double up_b = tension_at(s, s.x_b) * std::sin(tangent_angle(s, s.x_b));
  const double up_a = -tension_at(s, s.x_a) * std::sin(tangent_angle(s, s.x_a));
  CHECK(up_a + up_b == Approx(c.weight_per_length() * 2.5).epsilon(1e-9));

  CHECK_THROWS_AS(tension_at(s, s.x_b + 0.1), Error);
}

TEST_CASE("cable bounds") {
  const CableProperties c = table_cable();
  const CableBounds b = cable_bounds({2, 0, 0}, {0, 0, 2.5}, 3.3, c);
  CHECK(b.l_min == Approx(std::sqrt(10.25)).epsilon(1e-12));
  CHECK(b.l_max == Approx(max_length({2.0, 2.5}, c)).epsilon(1e-15));
  CHECK(b.satisfied() == (b.l_min <= 3.3 && 3.3 <= b.l_max));

  const CableBounds v = cable_bounds({0, 0, 0}, {0, 0, 2}, 2.05, c);
  CHECK(v.l_min == Approx(2.0));
  CHECK(v.l_max == Approx(2.1));
  CHECK(v.satisfied());
  CHECK(v.squared_violation() == 0.0);

  const CableBounds t = cable_bounds({3, 0, 0}, {0, 0, 0}, 2.9, c);
  CHECK_FALSE(t.satisfied());
  CHECK(t.squared_violation() == Approx(9.0 - 2.9 * 2.9).epsilon(1e-12));
}

TEST_CASE("sampled shapes") {
  const CableProperties c = table_cable();
  const CatenarySolution s = solve_catenary({2.0, 1.0}, 2.6, c);
  const auto ends = sample_shape(s, 2);
  REQUIRE(ends.size() == 2);
  CHECK(ends[0].x() == Approx(s.x_a));
  CHECK(ends[0].y() == Approx(s.height_at(s.x_a)));
  CHECK(ends[1].x() == Approx(s.x_b));

  const CatenarySolution sym = solve_catenary({2.0, 0.0}, 2.5, c);
  const auto three = sample_shape(sym, 3);
  CHECK(std::abs(three[1].x()) < 1e-9);
  CHECK(std::abs(three[1].y()) < 1e-9);

  const auto dense = sample_shape(s, 10000);
  double length = 0.0;
  for (std::size_t i = 1; i < dense.size(); ++i) length += (dense[i] - dense[i - 1]).norm();
  CHECK(length == Approx(s.length).epsilon(1e-5));

  const Vec3 attach(1.0, 0.0, 0.0), anchor(3.0, 0.0, 1.0);
  const auto world = sample_shape_world(s, 50, attach, anchor);
  CHECK((world.front() - attach).norm() < 1e-9);
  CHECK((world.back() - anchor).norm() < 1e-9);
}

TEST_CASE("randomised catenary properties") {
  const CableProperties c = table_cable();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> up(0.1, 5.0), uh(-2.0, 2.0), ux(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const PlanarConfiguration cfg{up(rng), uh(rng)};
    const double chord = chord_length(cfg);
    const double L = chord + 3.0 * std::max(ux(rng), 1e-6);
    const CatenarySolution s = solve_catenary(cfg, L, c);
    CAPTURE(cfg.p);
    CAPTURE(cfg.H);
    CAPTURE(L);
    CHECK(s.a > 0.0);
    CHECK(std::abs(s.rise() - cfg.H) < 1e-9 * std::max(1.0, std::abs(cfg.H)));
    CHECK(std::abs(s.a * (std::sinh(s.x_b / s.a) - std::sinh(s.x_a / s.a)) - L) < 1e-9 * L);
    CHECK(arc_length_by_quadrature(s) == Approx(L).epsilon(1e-6));
    CHECK(s.length >= chord);
    CHECK(max_length(cfg, c) >= chord);

    const bool slack = s.x_a < 0.0 && s.x_b > 0.0;
    CHECK((s.state == CableState::Slack) == slack);
    CHECK((sag_below_lower_endpoint(s) > 0.0) == slack);

    // Horizontal tension component is the same everywhere.
    for (double f : {0.0, 0.3, 0.7, 1.0}) {
      const double x = s.x_a + f * (s.x_b - s.x_a);
      CHECK(tension_at(s, x) * std::cos(tangent_angle(s, x)) == Approx(s.T0).epsilon(1e-9));
    }
  }
}

TEST_CASE("sag shrinks monotonically as the cable tightens") {
  const PlanarConfiguration cfg{3.0, -1.2};
  const double chord = chord_length(cfg);
  double previous = INFINITY;
  for (int k = 0; k < 10; ++k) {
    const double sag = max_sag_below_chord(solve_catenary(cfg, chord + std::pow(0.1, k), table_cable()));
    CHECK(sag < previous);
    previous = sag;
  }
  CHECK(previous < 1e-3);
}

TEST_CASE("max_length grows with the sag limit") {
  CableProperties c = table_cable();
  for (const PlanarConfiguration cfg : {PlanarConfiguration{2.0, 0.0}, PlanarConfiguration{3.0, 1.5},
                                        PlanarConfiguration{0.5, -2.0}}) {
    double previous = 0.0;
    for (double d : {0.0, 0.01, 0.05, 0.1, 0.5, 1.0}) {
      c.sag_limit = d;
      const double l = max_length(cfg, c);
      CHECK(l >= previous);
      previous = l;
    }
  }
}

TEST_CASE("attachment offset raises the attachment point") {
  CableProperties c = table_cable();
  c.attachment_offset = 0.05;
  const Vec3 a = attachment_point({1.0, 2.0, 3.0}, c);
  CHECK(a.isApprox(Vec3(1.0, 2.0, 3.05)));
}

TEST_CASE("winch schedule clips to capacity and stow length") {
  WinchSchedule w;
  w.initial_length = 1.0;
  w.payout_speed = 0.5;
  w.capacity = 2.0;
  CHECK(w.length_at(1.0) == Approx(1.5));
  CHECK(w.rate_at(1.0) == 0.5);
  CHECK(w.length_at(5.0) == 2.0);
  CHECK(w.rate_at(5.0) == 0.0);

  w.payout_speed = -0.5;
  w.stow_length = 0.3;
  CHECK(w.length_at(10.0) == Approx(0.3));
  CHECK(w.rate_at(10.0) == 0.0);
}
