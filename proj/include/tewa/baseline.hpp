#pragma once

// Comparators for the two-stage algorithm: a one-pass greedy heuristic and an
// exhaustive optimum for desk-sized instances.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tewa/threat_eval.hpp"
#include "tewa/weapon_assign.hpp"

namespace tewa {

inline constexpr std::size_t kOracleMaxThreats = 8;
inline constexpr std::size_t kOracleMaxWeapons = 8;

// Every (threat, weapon) pair either side may use, weighted by the
// weapon-pair weight. A pair is allowed when the weapon is a feasible
// candidate for the threat and the weapon's asset may take the threat.
struct AssignmentProblem {
  std::vector<std::string> track_ids;
  std::vector<std::string> ws_ids;
  std::vector<std::optional<double>> weight;  // tracks x weapons
  int capacity = kWeaponCapacity;

  const std::optional<double>& weight_at(std::size_t k, std::size_t j) const {
    return weight[k * ws_ids.size() + j];
  }
};

AssignmentProblem build_assignment_problem(std::span<const TrackState> tracks,
                                           std::span<const DefendedAsset> das,
                                           std::span<const WeaponSystem> weapons,
                                           const Libraries& libraries,
                                           const WeightsConfig& weights, double clock);

// Sum of pair weights over scheduled entries. Throws std::invalid_argument
// for an entry the problem does not allow.
double schedule_value(const AssignmentProblem& problem, const WsSchedule& schedule);

struct GreedyResult {
  ThreatDaMatching matching;
  WsSchedule schedule;
};

// Threats in descending raw opportunity each grab the heaviest open
// (asset, weapon) slot; choices are never revisited.
GreedyResult greedy_assign(std::span<const TrackState> tracks, std::span<const DefendedAsset> das,
                           std::span<const WeaponSystem> weapons, const Libraries& libraries,
                           const WeightsConfig& weights, double clock);

struct OracleResult {
  double value = 0.0;
  WsSchedule schedule;
  std::size_t nodes = 0;
};

// Branch-and-bound over all capacity-feasible schedules. Throws
// InstanceTooLarge beyond 8 threats or 8 weapons.
OracleResult exhaustive_oracle(const AssignmentProblem& problem);
OracleResult exhaustive_oracle(std::span<const TrackState> tracks,
                               std::span<const DefendedAsset> das,
                               std::span<const WeaponSystem> weapons, const Libraries& libraries,
                               const WeightsConfig& weights, double clock);

}  // namespace tewa
