#pragma once

// Planar intercept mathematics. Distances are kilometres, times seconds,
// angles radians measured counter-clockwise from +x.

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace tewa::geometry {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// |discriminant| below this (km^2) collapses two roots into one tangent point.
inline constexpr double kTangencyTolerance = 1e-12;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(Vec2 v, double s) { return {v.x * s, v.y * s}; }
inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline Vec2 operator/(Vec2 v, double s) { return {v.x / s, v.y / s}; }
inline bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator+(Point2 p, Vec2 v) { return {p.x + v.x, p.y + v.y}; }
inline Point2 operator-(Point2 p, Vec2 v) { return {p.x - v.x, p.y - v.y}; }
inline bool operator==(Point2 a, Point2 b) { return a.x == b.x && a.y == b.y; }

struct Circle {
  Point2 center;
  double radius = 1.0;

  bool contains(Point2 p) const;
};

// Line y = m x + c. Only exists for non-vertical directions.
struct SlopeIntercept {
  double slope = 0.0;
  double intercept = 0.0;
};

// Parametric half-line origin + t * direction with |direction| = 1, so the
// parameter t is a signed distance in km.
class Ray {
 public:
  // Throws std::invalid_argument for a zero or non-finite direction.
  static Ray through(Point2 origin, Vec2 direction);

  Point2 origin() const { return origin_; }
  Vec2 direction() const { return direction_; }
  Point2 at(double t) const { return origin_ + direction_ * t; }
  double parameter_of(Point2 p) const { return dot(p - origin_, direction_); }

  std::optional<SlopeIntercept> slope_intercept() const;

 private:
  Ray(Point2 origin, Vec2 direction) : origin_(origin), direction_(direction) {}

  Point2 origin_;
  Vec2 direction_;
};

// Angular window of a circle. Bearings in [start, start + sweep] (mod 2*pi)
// are inside; the centre itself counts as inside.
struct Sector {
  Circle circle;
  double start_angle = 0.0;
  double sweep_angle = kTwoPi;

  bool contains_bearing(double bearing) const;
  bool contains(Point2 p) const;
};

struct RayHit {
  Point2 point;
  // Signed distance along the ray; negative means behind the origin.
  double t = 0.0;
};

// Coefficients of a x^2 + b x + c = 0 obtained by substituting y = m x + c
// into the circle equation.
struct QuadraticCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

struct TimedPoint {
  double time = 0.0;
  Point2 position;
};

struct VelocityEstimate {
  Vec2 velocity;
  double speed = 0.0;
};

struct SectorCrossing {
  Point2 entry;
  Point2 exit;
  double entry_time = 0.0;
  double exit_time = 0.0;
};

struct InterceptSolution {
  double time_of_flight = 0.0;
  Point2 launch_point;
  Point2 impact_point;
};

double normalize_angle(double angle);
double bearing(Point2 from, Point2 to);

// Circle/line points of intersection sorted by ray parameter, including
// points behind the origin. Empty when the line misses the circle.
std::vector<RayHit> circle_line_poi(const Circle& circle, const Ray& ray);

// Slope-intercept route to the same points. Uses the linear coefficient
// b = 2(mc - x0 - m*y0); points are sorted by x.
QuadraticCoefficients slope_form_coefficients(const Circle& circle, SlopeIntercept line);
std::vector<Point2> circle_line_poi_slope(const Circle& circle, SlopeIntercept line);

double euclidean_distance(Point2 a, Point2 b);

// distance / speed; std::nullopt when speed <= 0 (the target never closes).
// Throws std::invalid_argument for a negative distance.
std::optional<double> time_to_point(double distance, double speed);

// Finite-difference velocity between two samples. Throws InvalidHistory when
// the timestamps do not strictly increase.
VelocityEstimate estimate_velocity(const TimedPoint& previous, const TimedPoint& current);

// First contiguous stretch of the ray (t >= 0) that lies inside the sector.
// Times are distances along the ray divided by target_speed.
// Throws std::invalid_argument if target_speed <= 0.
std::optional<SectorCrossing> sector_intercept(const Sector& sector, const Ray& ray,
                                               double target_speed);

// Smallest t > 0 with |target + v t - shooter| = projectile_speed * t.
std::optional<InterceptSolution> solve_intercept(Point2 target_position, Vec2 target_velocity,
                                                 Point2 shooter, double projectile_speed);

double required_elevation(double altitude, double ground_distance);

}  // namespace tewa::geometry
