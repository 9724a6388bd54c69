#pragma once

// Tracks, defended assets, weapon systems and the tunable weight set shared by
// both assignment stages.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tewa/geometry.hpp"

namespace tewa {

using geometry::Point2;
using geometry::Vec2;

enum class TrackStatus { Pending, Alive, Neutralized, Leaked, Exited };
enum class AssetStatus { FreeToFire, OnHold, Tight };
enum class WeaponCondition { Up, Down, Destroyed };
enum class DefenseMode { Preferential, Subtractive };

std::string_view to_string(TrackStatus s);
std::string_view to_string(AssetStatus s);
std::string_view to_string(WeaponCondition c);
std::string_view to_string(DefenseMode m);
// Parsers accept the names produced above (case-insensitive); they throw
// ValidationError otherwise.
AssetStatus parse_asset_status(std::string_view s);
WeaponCondition parse_weapon_condition(std::string_view s);
DefenseMode parse_defense_mode(std::string_view s);

struct TrackState {
  std::string track_id;
  // Oldest first, timestamps strictly increasing.
  std::vector<geometry::TimedPoint> samples;
  double altitude = 0.0;  // km
  std::string threat_class;
  double value = 1.0;
  TrackStatus status = TrackStatus::Alive;

  Point2 position() const { return samples.back().position; }
  double last_seen() const { return samples.back().time; }
  // Finite difference over the two newest samples; nullopt with one sample.
  std::optional<geometry::VelocityEstimate> velocity() const;
};

struct DefendedAsset {
  std::string da_id;
  geometry::Circle footprint;
  double priority = 0.5;
  double vulnerability = 0.5;
  AssetStatus status = AssetStatus::FreeToFire;
  std::vector<std::string> weapon_ids;
  int quota = 1;  // max concurrently assigned threats
  bool damaged = false;
};

struct WeaponSystem {
  std::string ws_id;
  std::string da_id;
  std::string weapon_class;
  Point2 position;
  double range = 1.0;  // km, radius of the firing sector
  double start_angle = 0.0;
  double sweep_angle = geometry::kTwoPi;
  double max_elevation = 1.0;      // rad
  double projectile_speed = 1.0;   // km/s
  double rate_of_fire = 1.0;       // rounds/s
  double stabilization_time = 0.0; // s
  double lethality_index = 1.0;
  WeaponCondition condition = WeaponCondition::Up;
  int ammo = 0;
  double load = 0.0;  // scheduled threats / 2

  geometry::Sector sector() const {
    return {{position, range}, start_angle, sweep_angle};
  }
};

struct Eq3Weights {
  double intent = 0.4;
  double capability = 0.4;
  double load = 0.2;
};

struct IntentWeights {
  double heading = 0.4;
  double closing_speed = 0.3;
  double time = 0.3;
};

struct DaPairWeights {
  double kill_capability = 0.3;
  double time = 0.5;
  double load = 0.2;
};

struct WsPairWeights {
  double time = 0.3;
  double elevation = 0.15;
  double lethality = 0.3;
  double stabilization = 0.1;
  double rate_of_fire = 0.15;
};

struct WeightsConfig {
  Eq3Weights eq3;
  IntentWeights intent;
  DaPairWeights da_pair;
  WsPairWeights ws_pair;

  // Minimum effectiveness for a weapon (or a DA's best weapon) to be offered
  // a threat at all.
  double capability_threshold = 0.5;
  double reference_speed = 0.3;         // km/s, closing speed that saturates intent
  double time_to_da_scale = 60.0;       // s
  double time_to_ws_scale = 30.0;       // s
  double stabilization_scale = 5.0;     // s
  double reference_rate_of_fire = 1.0;  // rounds/s
  int shots_per_engagement = 1;

  std::optional<DefenseMode> mode_override;
  // Objective currently folded into pair weights and ranking; set by apply_mode.
  std::optional<DefenseMode> objective;

  // Throws ValidationError unless every group lies in [0,1] and sums to 1.
  void validate() const;
};

// Default quota for a DA with the given number of attached weapons.
inline int default_quota(std::size_t weapon_count) {
  return weapon_count == 0 ? 1 : static_cast<int>(2 * weapon_count);
}

}  // namespace tewa
