#include "tewa/domain.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "tewa/errors.hpp"

namespace tewa {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void check_group(std::initializer_list<double> values, const char* name) {
  double sum = 0.0;
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValidationError(std::string(name) + " weights must lie in [0, 1]");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError(std::string(name) + " weights must sum to 1 (got " +
                          std::to_string(sum) + ")");
  }
}

}  // namespace

std::string_view to_string(TrackStatus s) {
  switch (s) {
    case TrackStatus::Pending: return "pending";
    case TrackStatus::Alive: return "alive";
    case TrackStatus::Neutralized: return "neutralized";
    case TrackStatus::Leaked: return "leaked";
    case TrackStatus::Exited: return "exited";
  }
  return "?";
}

std::string_view to_string(AssetStatus s) {
  switch (s) {
    case AssetStatus::FreeToFire: return "free_to_fire";
    case AssetStatus::OnHold: return "on_hold";
    case AssetStatus::Tight: return "tight";
  }
  return "?";
}

std::string_view to_string(WeaponCondition c) {
  switch (c) {
    case WeaponCondition::Up: return "up";
    case WeaponCondition::Down: return "down";
    case WeaponCondition::Destroyed: return "destroyed";
  }
  return "?";
}

std::string_view to_string(DefenseMode m) {
  return m == DefenseMode::Preferential ? "preferential" : "subtractive";
}

AssetStatus parse_asset_status(std::string_view s) {
  const auto v = lower(s);
  if (v == "free_to_fire") return AssetStatus::FreeToFire;
  if (v == "on_hold") return AssetStatus::OnHold;
  // "freeze" is the same third state under another name.
  if (v == "tight" || v == "freeze") return AssetStatus::Tight;
  throw ValidationError("unknown DA status '" + std::string(s) + "'");
}

WeaponCondition parse_weapon_condition(std::string_view s) {
  const auto v = lower(s);
  if (v == "up") return WeaponCondition::Up;
  if (v == "down") return WeaponCondition::Down;
  if (v == "destroyed") return WeaponCondition::Destroyed;
  throw ValidationError("unknown weapon condition '" + std::string(s) + "'");
}

DefenseMode parse_defense_mode(std::string_view s) {
  const auto v = lower(s);
  if (v == "preferential") return DefenseMode::Preferential;
  if (v == "subtractive") return DefenseMode::Subtractive;
  throw ValidationError("unknown defense mode '" + std::string(s) + "'");
}

std::optional<geometry::VelocityEstimate> TrackState::velocity() const {
  if (samples.size() < 2) return std::nullopt;
  return geometry::estimate_velocity(samples[samples.size() - 2], samples.back());
}

void WeightsConfig::validate() const {
  check_group({eq3.intent, eq3.capability, eq3.load}, "eq3");
  check_group({intent.heading, intent.closing_speed, intent.time}, "intent");
  check_group({da_pair.kill_capability, da_pair.time, da_pair.load}, "da_pair");
  check_group({ws_pair.time, ws_pair.elevation, ws_pair.lethality, ws_pair.stabilization,
               ws_pair.rate_of_fire},
              "ws_pair");
  if (!(capability_threshold >= 0.0 && capability_threshold <= 1.0)) {
    throw ValidationError("capability_threshold must lie in [0, 1]");
  }
  if (!(reference_speed > 0.0) || !(time_to_da_scale > 0.0) || !(time_to_ws_scale > 0.0) ||
      !(stabilization_scale > 0.0) || !(reference_rate_of_fire > 0.0)) {
    throw ValidationError("reference speeds and time scales must be positive");
  }
  if (shots_per_engagement < 1) throw ValidationError("shots_per_engagement must be >= 1");
}

}  // namespace tewa
