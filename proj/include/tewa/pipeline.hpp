#pragma once

// One decision pass of the two-stage algorithm: pair threats with assets,
// rank them, then schedule them onto weapons.

#include <span>
#include <string>
#include <vector>

#include "tewa/threat_eval.hpp"
#include "tewa/weapon_assign.hpp"

namespace tewa {

struct TwoStageResult {
  ThreatEvaluation te;
  std::vector<std::string> ranked;
  WaOutcome wa;
  WsSchedule schedule;
};

// Locked entries of `schedule` are kept and count against their asset's
// quota; queued entries are dropped and their threats propose again.
TwoStageResult two_stage_assign(std::span<const TrackState> tracks,
                                std::span<const DefendedAsset> das,
                                std::span<const WeaponSystem> weapons, const Libraries& libraries,
                                const WeightsConfig& weights, double clock,
                                WsSchedule schedule = {});

}  // namespace tewa
