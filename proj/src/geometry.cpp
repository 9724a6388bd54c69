#include "tewa/geometry.hpp"

#include <algorithm>
#include <stdexcept>

#include "tewa/errors.hpp"

namespace tewa::geometry {

namespace {

constexpr double kAngleSlack = 1e-12;

bool finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

}  // namespace

bool Circle::contains(Point2 p) const {
  return (p - center).squared_norm() <= radius * radius;
}

Ray Ray::through(Point2 origin, Vec2 direction) {
  const double n = direction.norm();
  if (!finite(origin) || !std::isfinite(n) || n == 0.0) {
    throw std::invalid_argument("ray direction must be finite and non-zero");
  }
  return Ray(origin, direction / n);
}

std::optional<SlopeIntercept> Ray::slope_intercept() const {
  if (direction_.x == 0.0) return std::nullopt;
  const double m = direction_.y / direction_.x;
  return SlopeIntercept{m, origin_.y - m * origin_.x};
}

double normalize_angle(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

double bearing(Point2 from, Point2 to) {
  const Vec2 d = to - from;
  return normalize_angle(std::atan2(d.y, d.x));
}

bool Sector::contains_bearing(double b) const {
  if (sweep_angle >= kTwoPi - kAngleSlack) return true;
  const double rel = normalize_angle(b - start_angle);
  return rel <= sweep_angle + kAngleSlack || rel >= kTwoPi - kAngleSlack;
}

bool Sector::contains(Point2 p) const {
  if (!circle.contains(p)) return false;
  if (p == circle.center) return true;
  return contains_bearing(bearing(circle.center, p));
}

std::vector<RayHit> circle_line_poi(const Circle& circle, const Ray& ray) {
  const Vec2 f = ray.origin() - circle.center;
  const double half_b = dot(ray.direction(), f);
  const double c = f.squared_norm() - circle.radius * circle.radius;
  const double disc = half_b * half_b - c;

  if (std::abs(disc) < kTangencyTolerance) {
    const double t = -half_b;
    return {RayHit{ray.at(t), t}};
  }
  if (disc < 0.0) return {};

  const double root = std::sqrt(disc);
  // Avoid cancellation: take the larger-magnitude root first, recover the
  // other from the product of roots (= c).
  const double q = -(half_b + std::copysign(root, half_b));
  double t1 = q;
  double t2 = c / q;
  if (t1 > t2) std::swap(t1, t2);
  return {RayHit{ray.at(t1), t1}, RayHit{ray.at(t2), t2}};
}

QuadraticCoefficients slope_form_coefficients(const Circle& circle, SlopeIntercept line) {
  const double m = line.slope;
  const double k = line.intercept;
  const double x0 = circle.center.x;
  const double y0 = circle.center.y;
  const double r = circle.radius;
  return {1.0 + m * m, 2.0 * (m * k - x0 - m * y0),
          x0 * x0 + y0 * y0 + k * k - r * r - 2.0 * y0 * k};
}

std::vector<Point2> circle_line_poi_slope(const Circle& circle, SlopeIntercept line) {
  const auto [a, b, c] = slope_form_coefficients(circle, line);
  const double disc = b * b - 4.0 * a * c;
  auto on_line = [&](double x) { return Point2{x, line.slope * x + line.intercept}; };
  if (disc < 0.0) return {};
  if (disc == 0.0) return {on_line(-b / (2.0 * a))};
  const double root = std::sqrt(disc);
  const double q = -0.5 * (b + std::copysign(root, b));
  double x1 = q / a;
  double x2 = c / q;
  if (x1 > x2) std::swap(x1, x2);
  return {on_line(x1), on_line(x2)};
}

double euclidean_distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::optional<double> time_to_point(double distance, double speed) {
  if (distance < 0.0) throw std::invalid_argument("distance must be non-negative");
  if (!(speed > 0.0)) return std::nullopt;
  return distance / speed;
}

VelocityEstimate estimate_velocity(const TimedPoint& previous, const TimedPoint& current) {
  const double dt = current.time - previous.time;
  if (!(dt > 0.0)) throw InvalidHistory("velocity estimate needs strictly increasing timestamps");
  const Vec2 v = (current.position - previous.position) / dt;
  return {v, v.norm()};
}

std::optional<SectorCrossing> sector_intercept(const Sector& sector, const Ray& ray,
                                               double target_speed) {
  if (!(target_speed > 0.0)) throw std::invalid_argument("target speed must be positive");

  const auto hits = circle_line_poi(sector.circle, ray);
  if (hits.size() < 2) return std::nullopt;
  const double lo = std::max(hits[0].t, 0.0);
  const double hi = hits[1].t;
  if (!(hi > lo)) return std::nullopt;

  // Bearing membership can only change where the line crosses a boundary
  // ray or passes the centre, so testing one point per piece is exact.
  std::vector<double> cuts{lo, hi};
  const Point2 centre = sector.circle.center;
  const Vec2 to_centre = centre - ray.origin();
  auto add_cut = [&](double t) {
    if (t > lo && t < hi) cuts.push_back(t);
  };
  if (sector.sweep_angle < kTwoPi - kAngleSlack) {
    for (double angle : {sector.start_angle, sector.start_angle + sector.sweep_angle}) {
      const Vec2 u{std::cos(angle), std::sin(angle)};
      const double denom = cross(ray.direction(), u);
      if (std::abs(denom) > 1e-15) add_cut(cross(to_centre, u) / denom);
    }
  }
  add_cut(dot(to_centre, ray.direction()));
  std::sort(cuts.begin(), cuts.end());

  auto inside = [&](double a, double b) {
    const Point2 mid = ray.at(0.5 * (a + b));
    return mid == centre || sector.contains_bearing(bearing(centre, mid));
  };

  std::optional<double> entry;
  double exit = lo;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (b <= a) continue;
    if (inside(a, b)) {
      if (!entry) entry = a;
      exit = b;
    } else if (entry) {
      break;
    }
  }
  if (!entry) return std::nullopt;
  return SectorCrossing{ray.at(*entry), ray.at(exit), *entry / target_speed, exit / target_speed};
}

std::optional<InterceptSolution> solve_intercept(Point2 target_position, Vec2 target_velocity,
                                                 Point2 shooter, double projectile_speed) {
  if (!(projectile_speed > 0.0)) throw std::invalid_argument("projectile speed must be positive");

  const Vec2 d = target_position - shooter;
  const double a = target_velocity.squared_norm() - projectile_speed * projectile_speed;
  const double b = 2.0 * dot(d, target_velocity);
  const double c = d.squared_norm();

  std::optional<double> best;
  auto consider = [&](double t) {
    if (std::isfinite(t) && t > 0.0 && (!best || t < *best)) best = t;
  };

  if (std::abs(a) <= 1e-15 * projectile_speed * projectile_speed) {
    if (b < 0.0) consider(-c / b);
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return std::nullopt;
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (q != 0.0) {
      consider(q / a);
      consider(c / q);
    }
  }
  if (!best) return std::nullopt;
  return InterceptSolution{*best, shooter, target_position + target_velocity * *best};
}

double required_elevation(double altitude, double ground_distance) {
  return std::atan2(altitude, ground_distance);
}

}  // namespace tewa::geometry
