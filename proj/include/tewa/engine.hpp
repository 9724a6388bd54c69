#pragma once

// Discrete-time OODA loop: move tracks, resolve engagements, re-pair threats
// with assets and weapons, fire, and log everything to a SimTrace.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tewa/domain.hpp"
#include "tewa/library.hpp"
#include "tewa/rng.hpp"
#include "tewa/scenario.hpp"
#include "tewa/trace.hpp"
#include "tewa/weapon_assign.hpp"

namespace tewa {

enum class EngagementOutcome { Pending, Kill, Miss };
enum class ModeDecision { Preferential, Subtractive, KeepCurrent };

std::string_view to_string(EngagementOutcome o);
std::string_view to_string(ModeDecision d);

struct EngagementEvent {
  std::string ws_id;
  std::string track_id;
  double fire_time = 0.0;
  double impact_time = 0.0;
  double sskp = 0.0;
  EngagementOutcome outcome = EngagementOutcome::Pending;
  std::uint64_t serial = 0;
};

// One observation of an externally simulated track.
struct TrackReport {
  std::string track_id;
  std::string threat_class;
  Point2 position;
  double altitude = 0.0;
  double value = 1.0;
  bool exited = false;
};

enum class TrackFeed { Scripted, External };

struct Metrics {
  int total_threats = 0;
  int threats_neutralized = 0;
  int leakers = 0;
  int threats_exited = 0;
  int threats_remaining = 0;   // alive or not yet spawned
  int threats_assigned_da = 0; // ever paired with an asset
  int threats_scheduled = 0;   // ever locked or queued on a weapon
  int idle_weapons = 0;        // never scheduled
  int max_scheduled_per_weapon = 0;
  double surviving_da_value = 0.0;
  double surviving_threat_value = 0.0;
  int ammo_spent = 0;
  double mean_time_to_neutralize = 0.0;
  std::map<std::string, double> mean_da_load;
  std::int64_t ticks = 0;

  nlohmann::json to_json() const;
  friend bool operator==(const Metrics&, const Metrics&) = default;
};

// Per-asset running sums of mean weapon load, sampled once per tick.
struct LoadAccumulator {
  std::map<std::string, double> sums;
  std::int64_t samples = 0;

  void sample(std::span<const DefendedAsset> das,
              const std::map<std::string, int>& scheduled_per_weapon,
              std::span<const WeaponSystem> weapons);
  std::map<std::string, double> means() const;
};

struct TickReport {
  std::vector<EngagementEvent> fired;
  std::vector<EngagementEvent> resolved;
  std::vector<std::string> leaked;
  std::optional<DefenseMode> mode_switched_to;
  double decide_ms = 0.0;  // wall time of mode selection + TE + WA
  std::size_t violations = 0;
};

struct SimState {
  std::shared_ptr<const ScenarioSpec> spec;
  TrackFeed feed = TrackFeed::Scripted;

  double clock = 0.0;
  std::int64_t tick = 0;
  std::vector<TrackState> tracks;
  std::vector<DefendedAsset> das;
  std::vector<WeaponSystem> weapons;
  WsSchedule schedule;
  std::vector<EngagementEvent> pending_engagements;
  DefenseMode mode = DefenseMode::Subtractive;
  Rng rng;
  int ammo_spent = 0;
  SimTrace trace;

  // Bookkeeping carried between ticks.
  std::map<std::string, std::string> te_assignment;
  std::map<std::string, ScheduleEntry> last_schedule;  // by track id
  std::map<std::string, double> next_fire_time;        // by ws id
  std::map<std::string, double> spawn_time;            // by track id
  std::map<std::string, double> threat_value;          // by track id
  std::vector<double> kill_latencies;
  std::map<std::string, bool> ever_scheduled_weapon;
  std::set<std::string> ever_assigned_da;
  std::set<std::string> ever_scheduled_track;
  int max_scheduled_per_weapon = 0;
  LoadAccumulator load;
  std::uint64_t next_serial = 0;
  TickReport last_tick;
};

SimState initial_state(const ScenarioSpec& spec, std::optional<std::uint64_t> seed = std::nullopt,
                       TrackFeed feed = TrackFeed::Scripted);

// Advances one tick of length state.spec->dt. The scripted overload moves
// tracks along their plans; the other takes positions from reports.
void step(SimState& state);
void step(SimState& state, std::span<const TrackReport> reports);

bool finished(const SimState& state);
Metrics current_metrics(const SimState& state);

// Recomputes the metrics purely from a trace and the deployment.
Metrics metrics_from_trace(const SimTrace& trace, const ScenarioSpec& spec);

ModeDecision select_mode(std::size_t alive_threats, std::size_t up_weapons,
                         const WeightsConfig& weights);
WeightsConfig apply_mode(DefenseMode mode, WeightsConfig weights);

double single_shot_kill_probability(const WeaponSystem& ws, const std::string& threat_class,
                                    const Libraries& libraries);
// Bernoulli(sskp) draw; the caller handles the look-then-shoot follow-up.
EngagementOutcome resolve_engagement(const EngagementEvent& event, Rng& rng);

struct RunStats {
  double max_decide_ms = 0.0;
  double wall_ms = 0.0;
  std::size_t violations = 0;
  std::optional<DefenseMode> first_decided_mode;
  std::vector<DefenseMode> modes;  // mode in force after each tick
};

struct RunResult {
  SimTrace trace;
  Metrics metrics;
  RunStats stats;
};

// Steps until every threat is resolved or max_time. Throws ScenarioInvalid
// for a spec that fails validation.
RunResult run_scenario(const ScenarioSpec& spec, std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace tewa
