#pragma once

// Stage two: match each ranked threat with a weapon system of its assigned
// asset. A weapon holds at most one locked threat plus one queued threat.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tewa/domain.hpp"
#include "tewa/library.hpp"
#include "tewa/threat_eval.hpp"

namespace tewa {

inline constexpr int kWeaponCapacity = 2;

enum class SlotKind { Locked, Queued };

struct ScheduleEntry {
  std::string ws_id;
  std::string track_id;
  SlotKind slot = SlotKind::Locked;
  double weight = 0.0;
  double since = 0.0;  // clock when the slot was taken
};

// Sparse form of the Scheduled / Locked indicator matrices.
class WsSchedule {
 public:
  const std::vector<ScheduleEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  // Appends without any checking; use check_constraints to validate.
  void add(ScheduleEntry entry);
  void remove_track(const std::string& track_id);
  void remove_weapon(const std::string& ws_id);
  void remove_queued();

  const ScheduleEntry* locked_at(const std::string& ws_id) const;
  const ScheduleEntry* queued_at(const std::string& ws_id) const;
  const ScheduleEntry* entry_for(const std::string& track_id) const;
  int scheduled_count(const std::string& ws_id) const;

  // Releases the lock on ws_id and promotes its queued threat, if any.
  // Returns the promoted track id.
  std::optional<std::string> release_lock(const std::string& ws_id, double clock);

  // Dense indicators over the given id orders, row = weapon, column = track.
  std::vector<std::vector<int>> scheduled_matrix(std::span<const std::string> ws_ids,
                                                 std::span<const std::string> track_ids) const;
  std::vector<std::vector<int>> locked_matrix(std::span<const std::string> ws_ids,
                                              std::span<const std::string> track_ids) const;

  // Entries sorted by (ws_id, slot) for stable output.
  std::vector<ScheduleEntry> sorted() const;

 private:
  std::vector<ScheduleEntry> entries_;
};

enum class ViolationKind {
  WeaponOverCapacity,   // more than two threats scheduled on one weapon
  MultipleLocks,        // a threat locked on more than one weapon
  LockedAndQueued,      // a threat both locked and queued
  SlotConflict,         // two locks or two queued threats on one weapon
  QueueWithoutLock,
};

struct Violation {
  ViolationKind kind;
  std::string subject;  // ws_id or track_id
  std::string detail;
};

std::string_view to_string(ViolationKind kind);
std::vector<Violation> check_constraints(const WsSchedule& schedule);

struct WsFeatures {
  double time_to_ws = 0.0;
  double required_elevation = 0.0;
  double max_elevation = 1.0;
  double lethality = 0.0;
  double stabilization_time = 0.0;
  double rate_of_fire = 0.0;
};

double ws_pair_weight(const WsFeatures& features, const WeightsConfig& weights);

struct WsCandidate {
  std::string ws_id;
  double entry_time = 0.0;  // absolute clock
  double exit_time = 0.0;
  double required_elevation = 0.0;
  double time_to_ws = 0.0;
  double tof = 0.0;
  double effectiveness = 0.0;
  Point2 impact_point;
  double pair_weight = 0.0;
};

// Feasible weapons of `da` for the track, best pair weight first (ties by id).
std::vector<WsCandidate> candidate_ws(const TrackState& track, const DefendedAsset& da,
                                      std::span<const WeaponSystem> weapons,
                                      const Libraries& libraries, const WeightsConfig& weights,
                                      double clock);

enum class ProposalOutcome { Locked, Queued, Rejected };

struct ProposalRecord {
  std::string track_id;
  std::string ws_id;
  double weight = 0.0;
  ProposalOutcome outcome = ProposalOutcome::Rejected;
  std::string bumped;  // track displaced from the queue, if any
};

struct WaOutcome {
  std::vector<ProposalRecord> proposals;
  std::vector<std::string> unassigned;  // threats that exhausted their list
};

// Threats propose down their candidate lists in the given order. A weapon
// locks when free, queues when only locked, and otherwise swaps its queued
// threat for a strictly heavier proposer; the displaced threat resumes below
// the weapon that dropped it. Locks are never displaced. Throws
// ConstraintViolation if the result breaks the slot rules.
WaOutcome assign_threats_to_ws(std::span<const std::string> ranked_threats,
                               const std::map<std::string, std::vector<WsCandidate>>& candidates,
                               WsSchedule& schedule, double clock);

// Builds candidate lists for every ranked threat from its TE assignment and
// runs the proposal pass.
WaOutcome assign_threats_to_ws(std::span<const std::string> ranked_threats,
                               const ThreatDaMatching& matching,
                               std::span<const TrackState> tracks,
                               std::span<const DefendedAsset> das,
                               std::span<const WeaponSystem> weapons, const Libraries& libraries,
                               const WeightsConfig& weights, WsSchedule& schedule, double clock);

}  // namespace tewa
