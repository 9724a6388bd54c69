#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "tewa/errors.hpp"
#include "tewa/geometry.hpp"

using namespace tewa;
using namespace tewa::geometry;
using doctest::Approx;

TEST_CASE("angles normalise into [0, 2pi)") {
  CHECK(normalize_angle(0.0) == 0.0);
  CHECK(normalize_angle(-std::numbers::pi / 2) == Approx(3 * std::numbers::pi / 2));
  CHECK(normalize_angle(5 * std::numbers::pi) == Approx(std::numbers::pi));
  CHECK(bearing({0, 0}, {0, 1}) == Approx(std::numbers::pi / 2));
  CHECK(bearing({1, 1}, {0, 1}) == Approx(std::numbers::pi));
}

TEST_CASE("ray rejects a zero direction") {
  CHECK_THROWS_AS(Ray::through({0, 0}, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(Ray::through({0, 0}, {NAN, 1}), std::invalid_argument);
}

TEST_CASE("circle/ray points of intersection") {
  const Circle unit{{0, 0}, 1.0};

  SUBCASE("secant through the centre") {
    const auto hits = circle_line_poi(unit, Ray::through({-5, 0}, {2, 0}));
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].t == Approx(4.0));
    CHECK(hits[0].point.x == Approx(-1.0));
    CHECK(hits[1].t == Approx(6.0));
    CHECK(hits[1].point.x == Approx(1.0));
  }
  SUBCASE("tangent line yields one point") {
    const auto hits = circle_line_poi(unit, Ray::through({-3, 1}, {1, 0}));
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].point.x == Approx(0.0));
    CHECK(hits[0].point.y == Approx(1.0));
  }
  SUBCASE("miss") {
    CHECK(circle_line_poi(unit, Ray::through({-3, 1.5}, {1, 0})).empty());
  }
  SUBCASE("points behind the origin are reported with negative t") {
    const auto hits = circle_line_poi(unit, Ray::through({5, 0}, {1, 0}));
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].t < 0.0);
    CHECK(hits[1].t < 0.0);
  }
}

TEST_CASE("slope form agrees with the parametric route") {
  // y = x + 1 against the circle of radius 2 centred at (1, 2):
  // (x-1)^2 + (x-1)^2 = 4 gives x = 1 +- sqrt(2).
  const Circle c{{1, 2}, 2.0};
  const SlopeIntercept line{1.0, 1.0};
  const auto coeff = slope_form_coefficients(c, line);
  CHECK(coeff.a == Approx(2.0));
  CHECK(coeff.b == Approx(2.0 * (1.0 * 1.0 - 1.0 - 1.0 * 2.0)));
  const auto pts = circle_line_poi_slope(c, line);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].x == Approx(1.0 - std::sqrt(2.0)));
  CHECK(pts[1].x == Approx(1.0 + std::sqrt(2.0)));

  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-20, 20);
  for (int i = 0; i < 500; ++i) {
    const Circle circle{{u(gen), u(gen)}, std::abs(u(gen)) + 0.5};
    const auto ray = Ray::through({u(gen), u(gen)}, {u(gen), u(gen)});
    const auto si = ray.slope_intercept();
    if (!si || std::abs(si->slope) > 1e3) continue;
    const auto a = circle_line_poi(circle, ray);
    const auto b = circle_line_poi_slope(circle, *si);
    if (a.size() != 2) continue;
    REQUIRE(b.size() == 2);
    // Both routes sorted by x after this.
    auto pa = std::vector<Point2>{a[0].point, a[1].point};
    if (pa[0].x > pa[1].x) std::swap(pa[0], pa[1]);
    for (int k = 0; k < 2; ++k) {
      CHECK(euclidean_distance(pa[k], b[k]) < 1e-6);
    }
  }
}

TEST_CASE("time to point") {
  CHECK(time_to_point(10.0, 0.5).value() == Approx(20.0));
  CHECK_FALSE(time_to_point(10.0, 0.0).has_value());
  CHECK_THROWS_AS(time_to_point(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("velocity estimate from two samples") {
  const auto v = estimate_velocity({0.0, {0, 0}}, {2.0, {6, 8}});
  CHECK(v.velocity.x == Approx(3.0));
  CHECK(v.velocity.y == Approx(4.0));
  CHECK(v.speed == Approx(5.0));
  CHECK_THROWS_AS(estimate_velocity({1.0, {0, 0}}, {1.0, {1, 1}}), InvalidHistory);
}

TEST_CASE("sector intercept on hand-built sectors") {
  SUBCASE("full circle reduces to the chord") {
    const Sector s{{{0, 0}, 5.0}, 0.0, kTwoPi};
    const auto c = sector_intercept(s, Ray::through({-10, 0}, {1, 0}), 0.5);
    REQUIRE(c);
    CHECK(c->entry.x == Approx(-5.0));
    CHECK(c->exit.x == Approx(5.0));
    CHECK(c->entry_time == Approx(10.0));
    CHECK(c->exit_time == Approx(30.0));
  }
  SUBCASE("upper half sector clips at the centre line") {
    const Sector s{{{0, 0}, 5.0}, 0.0, std::numbers::pi};
    // Falling vertically through x = 1: inside for y in [0, sqrt(24)].
    const auto c = sector_intercept(s, Ray::through({1, 10}, {0, -1}), 1.0);
    REQUIRE(c);
    CHECK(c->entry.y == Approx(std::sqrt(24.0)));
    CHECK(c->exit.y == Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("path that only crosses the excluded side") {
    const Sector s{{{0, 0}, 5.0}, 0.0, std::numbers::pi / 2};
    CHECK_FALSE(sector_intercept(s, Ray::through({-2, 10}, {0, -1}), 1.0));
  }
  SUBCASE("origin inside the sector enters at time zero") {
    const Sector s{{{0, 0}, 5.0}, 0.0, kTwoPi};
    const auto c = sector_intercept(s, Ray::through({1, 1}, {1, 0}), 2.0);
    REQUIRE(c);
    CHECK(c->entry_time == 0.0);
  }
  SUBCASE("tangent path has no crossing") {
    const Sector s{{{0, 0}, 5.0}, 0.0, kTwoPi};
    CHECK_FALSE(sector_intercept(s, Ray::through({-10, 5}, {1, 0}), 1.0));
  }
  SUBCASE("non-positive speed is rejected") {
    const Sector s{{{0, 0}, 5.0}, 0.0, kTwoPi};
    CHECK_THROWS_AS(sector_intercept(s, Ray::through({-10, 0}, {1, 0}), 0.0), std::invalid_argument);
  }
}

TEST_CASE("sector intercept matches dense sampling on random sectors") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1, 1);
  int compared = 0;
  for (int i = 0; i < 200; ++i) {
    // The excluded wedge stays wide enough for the 1 m sampling step to see it.
    const double sweep = u(gen) > 0.8 ? kTwoPi : (0.2 + 0.75 * std::abs(u(gen))) * kTwoPi;
    const Sector s{{{10 * u(gen), 10 * u(gen)}, 3 + 4 * std::abs(u(gen))}, normalize_angle(4 * u(gen)),
                   sweep};
    const Point2 origin{s.circle.center.x + 15 * u(gen), s.circle.center.y + 15 * u(gen)};
    const Vec2 aim = (s.circle.center + Vec2{4 * u(gen), 4 * u(gen)}) - origin;
    const auto ray = Ray::through(origin, aim);
    const auto got = sector_intercept(s, ray, 1.0);
    const auto want = testing::dense_sector_crossing(s, origin.x, origin.y, ray.direction().x,
                                                     ray.direction().y);
    REQUIRE(got.has_value() == want.has_value());
    if (!got) continue;
    ++compared;
    CHECK(std::abs(got->entry_time - want->first) < 1e-3);
    CHECK(std::abs(got->exit_time - want->second) < 1e-3);
  }
  CHECK(compared > 100);
}

TEST_CASE("sector intercept is translation invariant") {
  const Sector s{{{0, 0}, 6.0}, 0.3, 2.0};
  const auto ray = Ray::through({-8, 3}, {1, -0.2});
  const auto base = sector_intercept(s, ray, 0.3);
  REQUIRE(base);
  const Vec2 shift{123.0, -45.0};
  const auto moved = sector_intercept({{s.circle.center + shift, 6.0}, 0.3, 2.0},
                                      Ray::through(Point2{-8, 3} + shift, {1, -0.2}), 0.3);
  REQUIRE(moved);
  CHECK(moved->entry_time == Approx(base->entry_time));
  CHECK(moved->exit_time == Approx(base->exit_time));
}

TEST_CASE("intercept solution") {
  SUBCASE("stationary target") {
    const auto s = solve_intercept({3, 4}, {0, 0}, {0, 0}, 1.0);
    REQUIRE(s);
    CHECK(s->time_of_flight == Approx(5.0));
  }
  SUBCASE("head-on target") {
    // Gap 10 km closing at 1 + 0.25 km/s.
    const auto s = solve_intercept({10, 0}, {-0.25, 0}, {0, 0}, 1.0);
    REQUIRE(s);
    CHECK(s->time_of_flight == Approx(8.0));
    CHECK(s->impact_point.x == Approx(8.0));
  }
  SUBCASE("target outrunning the projectile") {
    CHECK_FALSE(solve_intercept({10, 0}, {2, 0}, {0, 0}, 1.0));
  }
  SUBCASE("equal speeds, receding target") {
    CHECK_FALSE(solve_intercept({10, 0}, {1, 0}, {0, 0}, 1.0));
  }
  SUBCASE("equal speeds, approaching target") {
    const auto s = solve_intercept({10, 0}, {-1, 0}, {0, 0}, 1.0);
    REQUIRE(s);
    CHECK(s->time_of_flight == Approx(5.0));
  }
  SUBCASE("invalid projectile speed") {
    CHECK_THROWS_AS(solve_intercept({1, 0}, {0, 0}, {0, 0}, 0.0), std::invalid_argument);
  }
}

TEST_CASE("intercept forward simulation on random engagements") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 300; ++i) {
    const Point2 target{20 * u(gen), 20 * u(gen)};
    const Vec2 v{0.5 * u(gen), 0.5 * u(gen)};
    const Point2 shooter{5 * u(gen), 5 * u(gen)};
    const double speed = 1.0 + std::abs(u(gen));
    const auto s = solve_intercept(target, v, shooter, speed);
    REQUIRE(s);  // projectile always faster here
    const double t = s->time_of_flight;
    const Vec2 aim = s->impact_point - shooter;
    const Point2 projectile = shooter + aim * (speed * t / aim.norm());
    const Point2 threat = target + v * t;
    CHECK(euclidean_distance(projectile, threat) < 1e-6);
  }
}

TEST_CASE("required elevation") {
  CHECK(required_elevation(1.0, 1.0) == Approx(std::numbers::pi / 4));
  CHECK(required_elevation(0.0, 5.0) == 0.0);
}
