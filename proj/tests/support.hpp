#pragma once

// Builders shared by the test suites and the acceptance runner.

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "tewa/domain.hpp"
#include "tewa/library.hpp"
#include "tewa/scenario.hpp"

namespace tewa::testing {

inline std::filesystem::path data_dir() { return TEWA_DATA_DIR; }

inline std::filesystem::path scenario_path(const std::string& name) {
  return data_dir() / "scenarios" / (name + ".json");
}

// jet / drone / rotor against gun / missile / bomb.
inline Libraries small_library() {
  CorrelationTable corr;
  corr.set("gun", "jet", 0.6);
  corr.set("gun", "drone", 0.9);
  corr.set("gun", "rotor", 0.8);
  corr.set_unknown("gun", 0.5);
  corr.set("missile", "jet", 0.95);
  corr.set("missile", "drone", 0.7);
  corr.set("missile", "rotor", 0.75);
  corr.set_unknown("missile", 0.6);
  corr.set("bomb", "jet", 0.2);
  corr.set("bomb", "drone", 0.55);
  corr.set("bomb", "rotor", 0.3);
  corr.set_unknown("bomb", 0.1);
  return Libraries({{"jet", "jet", 0.6, 0.3, 0.8},
                    {"drone", "drone", 0.4, 0.1, 0.4},
                    {"rotor", "rotor", 0.5, 0.08, 0.6}},
                   {{"gun", "gun", 0.8, 0.5}, {"missile", "missile", 0.9, 0.9}, {"bomb", "bomb", 0.5, 0.1}},
                   std::move(corr), {"unknown", "unknown", 1.0, 0.3, 1.0});
}

// Track with two samples one second apart ending at `position` at time t.
inline TrackState moving_track(const std::string& id, const std::string& cls, Point2 position,
                               Vec2 velocity, double t = 1.0, double altitude = 0.0) {
  TrackState track;
  track.track_id = id;
  track.threat_class = cls;
  track.altitude = altitude;
  track.samples = {{t - 1.0, position - velocity}, {t, position}};
  return track;
}

inline DefendedAsset asset(const std::string& id, Point2 centre, double radius = 1.0,
                           double priority = 0.5, int quota = 2) {
  DefendedAsset da;
  da.da_id = id;
  da.footprint = {centre, radius};
  da.priority = priority;
  da.quota = quota;
  return da;
}

inline WeaponSystem weapon(const std::string& id, const std::string& da, const std::string& cls,
                           Point2 position, double range = 10.0) {
  WeaponSystem ws;
  ws.ws_id = id;
  ws.da_id = da;
  ws.weapon_class = cls;
  ws.position = position;
  ws.range = range;
  ws.max_elevation = 1.4;
  ws.projectile_speed = 1.0;
  ws.rate_of_fire = 1.0;
  ws.stabilization_time = 1.0;
  ws.lethality_index = 0.8;
  ws.ammo = 10;
  return ws;
}

inline void attach(std::vector<DefendedAsset>& das, const std::vector<WeaponSystem>& weapons) {
  for (auto& da : das) {
    da.weapon_ids.clear();
    for (const auto& w : weapons) {
      if (w.da_id == da.da_id) da.weapon_ids.push_back(w.ws_id);
    }
  }
}

struct RandomInstance {
  Libraries libraries = small_library();
  std::vector<TrackState> tracks;
  std::vector<DefendedAsset> das;
  std::vector<WeaponSystem> weapons;
  WeightsConfig weights;
  double clock = 1.0;
};

// Desk-sized battlefield: 1-3 assets within 10 km of the origin, up to 8
// weapons in total, up to 8 threats inbound from 12-25 km.
inline RandomInstance random_instance(std::uint64_t seed, int max_threats = 8, int max_weapons = 8) {
  std::mt19937_64 gen(seed);
  auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); };
  auto pick = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen); };
  const char* weapon_classes[] = {"gun", "missile", "bomb"};
  const char* threat_classes[] = {"jet", "drone", "rotor"};

  RandomInstance inst;
  const int n_das = pick(1, 3);
  const int n_ws = pick(n_das, std::max(n_das, max_weapons));
  for (int i = 0; i < n_das; ++i) {
    inst.das.push_back(asset("D" + std::to_string(i), {uni(-10, 10), uni(-10, 10)}, uni(0.8, 2.0),
                             uni(0.2, 1.0), 0));
  }
  for (int j = 0; j < n_ws; ++j) {
    const auto& da = inst.das[j < n_das ? j : pick(0, n_das - 1)];
    auto ws = weapon("W" + std::to_string(j), da.da_id, weapon_classes[pick(0, 2)],
                     da.footprint.center + Vec2{uni(-1.5, 1.5), uni(-1.5, 1.5)}, uni(6.0, 14.0));
    ws.start_angle = uni(0, geometry::kTwoPi);
    ws.sweep_angle = uni(0.3, 1.0) * geometry::kTwoPi;
    ws.lethality_index = uni(0.3, 1.0);
    ws.stabilization_time = uni(0.0, 6.0);
    ws.rate_of_fire = uni(0.3, 2.0);
    ws.projectile_speed = uni(0.8, 2.0);
    inst.weapons.push_back(ws);
  }
  attach(inst.das, inst.weapons);
  for (auto& da : inst.das) da.quota = default_quota(da.weapon_ids.size());

  const int n_threats = pick(1, max_threats);
  for (int k = 0; k < n_threats; ++k) {
    const auto& target = inst.das[pick(0, n_das - 1)].footprint.center;
    const double bearing = uni(0, geometry::kTwoPi);
    const double dist = uni(12, 25);
    const Point2 pos = target + Vec2{dist * std::cos(bearing), dist * std::sin(bearing)};
    const Point2 aim = target + Vec2{uni(-3, 3), uni(-3, 3)};
    const Vec2 dir = aim - pos;
    const double speed = uni(0.08, 0.45);
    inst.tracks.push_back(moving_track("T" + std::to_string(k), threat_classes[pick(0, 2)], pos,
                                       dir * (speed / dir.norm()), inst.clock, uni(0.0, 2.0)));
  }
  return inst;
}

// A full scripted scenario around a random instance: each threat keeps its
// heading and flies on well past its target.
inline ScenarioSpec random_scenario(std::uint64_t seed) {
  auto inst = random_instance(seed);
  std::mt19937_64 gen(seed ^ 0x5eedULL);
  auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); };
  ScenarioSpec spec;
  spec.name = "random_" + std::to_string(seed);
  spec.libraries = inst.libraries;
  spec.das = inst.das;
  for (auto& d : spec.das) d.vulnerability = uni(0.2, 0.9);
  spec.weapons = inst.weapons;
  for (const auto& t : inst.tracks) {
    const auto v = t.velocity()->velocity;
    const double speed = v.norm();
    ThreatPlan plan;
    plan.track_id = t.track_id;
    plan.threat_class = t.threat_class;
    plan.waypoints = {t.position(), t.position() + v * (40.0 / speed)};
    plan.leg_speeds = {speed};
    plan.spawn_time = uni(0.0, 20.0);
    plan.altitude = t.altitude;
    plan.value = uni(0.1, 1.0);
    spec.threats.push_back(plan);
  }
  spec.dt = 0.5;
  spec.max_time = 200.0;
  spec.seed = seed;
  return spec;
}

}  // namespace tewa::testing
