#pragma once

// Scenario documents: deployment (assets, weapons, libraries), scripted
// threats and run parameters.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tewa/domain.hpp"
#include "tewa/library.hpp"

namespace tewa {

// A scripted threat: piecewise-linear flight through waypoints, one speed per
// leg. A single waypoint means a hovering threat.
struct ThreatPlan {
  std::string track_id;
  std::string threat_class;
  std::vector<Point2> waypoints;
  std::vector<double> leg_speeds;  // km/s, waypoints.size() - 1 entries
  double spawn_time = 0.0;
  double altitude = 0.0;
  double value = 1.0;

  // Ground-truth position at absolute time t >= spawn_time; nullopt once the
  // final waypoint has been passed.
  std::optional<Point2> position_at(double t) const;
};

struct ScenarioSpec {
  std::string name;
  Libraries libraries;
  std::vector<DefendedAsset> das;
  std::vector<WeaponSystem> weapons;
  std::vector<ThreatPlan> threats;
  WeightsConfig weights;
  double dt = 0.1;
  double max_time = 120.0;
  std::uint64_t seed = 1;
  DefenseMode initial_mode = DefenseMode::Subtractive;

  // Throws ValidationError on dangling references or out-of-range values.
  void validate() const;
};

// base_dir resolves a "libraries" entry given as a relative file path.
// Throws ParseError (malformed text or field types) and ValidationError.
ScenarioSpec parse_scenario(std::string_view document,
                            const std::filesystem::path& base_dir = {});
ScenarioSpec load_scenario_file(const std::filesystem::path& path);

nlohmann::json scenario_to_json(const ScenarioSpec& spec);
std::string serialize_scenario(const ScenarioSpec& spec);
std::string scenario_hash(const ScenarioSpec& spec);

WeightsConfig weights_from_json(const nlohmann::json& doc);
nlohmann::json weights_to_json(const WeightsConfig& weights);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace tewa
