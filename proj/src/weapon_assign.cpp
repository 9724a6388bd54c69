#include "tewa/weapon_assign.hpp"

#include <algorithm>
#include <cmath>

#include "tewa/errors.hpp"

namespace tewa {

void WsSchedule::add(ScheduleEntry entry) { entries_.push_back(std::move(entry)); }

void WsSchedule::remove_track(const std::string& track_id) {
  std::erase_if(entries_, [&](const ScheduleEntry& e) { return e.track_id == track_id; });
}

void WsSchedule::remove_weapon(const std::string& ws_id) {
  std::erase_if(entries_, [&](const ScheduleEntry& e) { return e.ws_id == ws_id; });
}

void WsSchedule::remove_queued() {
  std::erase_if(entries_, [](const ScheduleEntry& e) { return e.slot == SlotKind::Queued; });
}

const ScheduleEntry* WsSchedule::locked_at(const std::string& ws_id) const {
  for (const auto& e : entries_) {
    if (e.ws_id == ws_id && e.slot == SlotKind::Locked) return &e;
  }
  return nullptr;
}

const ScheduleEntry* WsSchedule::queued_at(const std::string& ws_id) const {
  for (const auto& e : entries_) {
    if (e.ws_id == ws_id && e.slot == SlotKind::Queued) return &e;
  }
  return nullptr;
}

const ScheduleEntry* WsSchedule::entry_for(const std::string& track_id) const {
  for (const auto& e : entries_) {
    if (e.track_id == track_id) return &e;
  }
  return nullptr;
}

int WsSchedule::scheduled_count(const std::string& ws_id) const {
  return static_cast<int>(
      std::count_if(entries_.begin(), entries_.end(), [&](const ScheduleEntry& e) { return e.ws_id == ws_id; }));
}

std::optional<std::string> WsSchedule::release_lock(const std::string& ws_id, double clock) {
  std::erase_if(entries_, [&](const ScheduleEntry& e) {
    return e.ws_id == ws_id && e.slot == SlotKind::Locked;
  });
  for (auto& e : entries_) {
    if (e.ws_id == ws_id && e.slot == SlotKind::Queued) {
      e.slot = SlotKind::Locked;
      e.since = clock;
      return e.track_id;
    }
  }
  return std::nullopt;
}

namespace {

std::vector<std::vector<int>> indicator(const std::vector<ScheduleEntry>& entries,
                                        std::span<const std::string> ws_ids,
                                        std::span<const std::string> track_ids, bool locked_only) {
  std::vector<std::vector<int>> m(ws_ids.size(), std::vector<int>(track_ids.size(), 0));
  for (const auto& e : entries) {
    if (locked_only && e.slot != SlotKind::Locked) continue;
    const auto j = std::find(ws_ids.begin(), ws_ids.end(), e.ws_id);
    const auto k = std::find(track_ids.begin(), track_ids.end(), e.track_id);
    if (j == ws_ids.end() || k == track_ids.end()) continue;
    m[static_cast<std::size_t>(j - ws_ids.begin())][static_cast<std::size_t>(k - track_ids.begin())] = 1;
  }
  return m;
}

}  // namespace

std::vector<std::vector<int>> WsSchedule::scheduled_matrix(std::span<const std::string> ws_ids,
                                                           std::span<const std::string> track_ids) const {
  return indicator(entries_, ws_ids, track_ids, false);
}

std::vector<std::vector<int>> WsSchedule::locked_matrix(std::span<const std::string> ws_ids,
                                                        std::span<const std::string> track_ids) const {
  return indicator(entries_, ws_ids, track_ids, true);
}

std::vector<ScheduleEntry> WsSchedule::sorted() const {
  auto out = entries_;
  std::sort(out.begin(), out.end(), [](const ScheduleEntry& a, const ScheduleEntry& b) {
    if (a.ws_id != b.ws_id) return a.ws_id < b.ws_id;
    if (a.slot != b.slot) return a.slot < b.slot;
    return a.track_id < b.track_id;
  });
  return out;
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::WeaponOverCapacity: return "weapon_over_capacity";
    case ViolationKind::MultipleLocks: return "multiple_locks";
    case ViolationKind::LockedAndQueued: return "locked_and_queued";
    case ViolationKind::SlotConflict: return "slot_conflict";
    case ViolationKind::QueueWithoutLock: return "queue_without_lock";
  }
  return "?";
}

std::vector<Violation> check_constraints(const WsSchedule& schedule) {
  struct Count {
    int locked = 0;
    int queued = 0;
  };
  std::map<std::string, Count> per_ws;
  std::map<std::string, Count> per_track;
  for (const auto& e : schedule.entries()) {
    auto& w = per_ws[e.ws_id];
    auto& t = per_track[e.track_id];
    if (e.slot == SlotKind::Locked) {
      ++w.locked;
      ++t.locked;
    } else {
      ++w.queued;
      ++t.queued;
    }
  }

  std::vector<Violation> out;
  for (const auto& [ws, c] : per_ws) {
    if (c.locked + c.queued > kWeaponCapacity) {
      out.push_back({ViolationKind::WeaponOverCapacity, ws,
                     std::to_string(c.locked + c.queued) + " threats scheduled"});
    }
    if (c.locked > 1 || c.queued > 1) {
      out.push_back({ViolationKind::SlotConflict, ws,
                     std::to_string(c.locked) + " locked, " + std::to_string(c.queued) + " queued"});
    }
    if (c.queued > 0 && c.locked == 0) {
      out.push_back({ViolationKind::QueueWithoutLock, ws, "queued threat without a lock"});
    }
  }
  for (const auto& [track, c] : per_track) {
    if (c.locked > 1) {
      out.push_back({ViolationKind::MultipleLocks, track,
                     "locked on " + std::to_string(c.locked) + " weapons"});
    }
    if (c.locked > 0 && c.queued > 0) {
      out.push_back({ViolationKind::LockedAndQueued, track, "locked and queued at once"});
    }
    if (c.queued > 1) {
      out.push_back({ViolationKind::SlotConflict, track,
                     "queued on " + std::to_string(c.queued) + " weapons"});
    }
  }
  return out;
}

double ws_pair_weight(const WsFeatures& f, const WeightsConfig& weights) {
  const auto& w = weights.ws_pair;
  const double time = std::exp(-std::max(f.time_to_ws, 0.0) / weights.time_to_ws_scale);
  const double elevation =
      f.max_elevation > 0.0
          ? std::clamp((f.max_elevation - f.required_elevation) / f.max_elevation, 0.0, 1.0)
          : 0.0;
  const double lethality = std::clamp(f.lethality, 0.0, 1.0);
  const double stabilization =
      std::exp(-std::max(f.stabilization_time, 0.0) / weights.stabilization_scale);
  const double rof = std::clamp(f.rate_of_fire / weights.reference_rate_of_fire, 0.0, 1.0);
  return std::clamp(w.time * time + w.elevation * elevation + w.lethality * lethality +
                        w.stabilization * stabilization + w.rate_of_fire * rof,
                    0.0, 1.0);
}

std::vector<WsCandidate> candidate_ws(const TrackState& track, const DefendedAsset& da,
                                      std::span<const WeaponSystem> weapons,
                                      const Libraries& libraries, const WeightsConfig& weights,
                                      double clock) {
  std::vector<WsCandidate> out;
  if (track.samples.empty()) return out;
  const Point2 pos = track.position();
  const auto vel = track.velocity();
  const bool moving = vel && vel->speed > 0.0;
  const Vec2 v = moving ? vel->velocity : Vec2{};

  for (const auto& ws : weapons) {
    if (ws.da_id != da.da_id || ws.condition != WeaponCondition::Up || ws.ammo <= 0) continue;
    const double eff = libraries.effectiveness(ws.weapon_class, track.threat_class);
    if (eff < weights.capability_threshold) continue;

    const auto sector = ws.sector();
    double entry = 0.0;
    double exit = 0.0;
    Point2 aim = pos;
    if (moving) {
      const auto crossing =
          geometry::sector_intercept(sector, geometry::Ray::through(pos, v), vel->speed);
      if (!crossing) continue;
      entry = crossing->entry_time;
      exit = crossing->exit_time;
      aim = crossing->entry;
    } else if (!sector.contains(pos)) {
      continue;
    }

    const auto intercept = geometry::solve_intercept(aim, v, ws.position, ws.projectile_speed);
    if (!intercept) continue;
    const double elevation = geometry::required_elevation(
        track.altitude, geometry::euclidean_distance(intercept->impact_point, ws.position));
    if (elevation > ws.max_elevation) continue;

    WsCandidate c;
    c.ws_id = ws.ws_id;
    c.entry_time = clock + entry;
    c.exit_time = clock + exit;
    c.required_elevation = elevation;
    c.time_to_ws = entry;
    c.tof = intercept->time_of_flight;
    c.effectiveness = eff;
    c.impact_point = intercept->impact_point;
    c.pair_weight = ws_pair_weight({entry, elevation, ws.max_elevation, ws.lethality_index,
                                    ws.stabilization_time, ws.rate_of_fire},
                                   weights);
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const WsCandidate& a, const WsCandidate& b) {
    if (a.pair_weight != b.pair_weight) return a.pair_weight > b.pair_weight;
    return a.ws_id < b.ws_id;
  });
  return out;
}

WaOutcome assign_threats_to_ws(std::span<const std::string> ranked_threats,
                               const std::map<std::string, std::vector<WsCandidate>>& candidates,
                               WsSchedule& schedule, double clock) {
  static const std::vector<WsCandidate> kNone;
  auto list_of = [&](const std::string& track) -> const std::vector<WsCandidate>& {
    const auto it = candidates.find(track);
    return it == candidates.end() ? kNone : it->second;
  };

  WaOutcome out;
  struct Pending {
    std::string track;
    std::size_t start;
  };
  for (const auto& threat : ranked_threats) {
    if (schedule.entry_for(threat) != nullptr) continue;
    std::vector<Pending> stack{{threat, 0}};
    while (!stack.empty()) {
      const Pending p = std::move(stack.back());
      stack.pop_back();
      const auto& list = list_of(p.track);
      bool placed = false;
      for (std::size_t i = p.start; i < list.size() && !placed; ++i) {
        const auto& c = list[i];
        ProposalRecord rec{p.track, c.ws_id, c.pair_weight, ProposalOutcome::Rejected, {}};
        const auto* queued = schedule.queued_at(c.ws_id);
        if (schedule.locked_at(c.ws_id) == nullptr) {
          schedule.add({c.ws_id, p.track, SlotKind::Locked, c.pair_weight, clock});
          rec.outcome = ProposalOutcome::Locked;
          placed = true;
        } else if (queued == nullptr) {
          schedule.add({c.ws_id, p.track, SlotKind::Queued, c.pair_weight, clock});
          rec.outcome = ProposalOutcome::Queued;
          placed = true;
        } else if (c.pair_weight > queued->weight) {
          const std::string bumped = queued->track_id;
          schedule.remove_track(bumped);
          schedule.add({c.ws_id, p.track, SlotKind::Queued, c.pair_weight, clock});
          rec.outcome = ProposalOutcome::Queued;
          rec.bumped = bumped;
          placed = true;
          const auto& bumped_list = list_of(bumped);
          const auto at = std::find_if(bumped_list.begin(), bumped_list.end(),
                                       [&](const WsCandidate& b) { return b.ws_id == c.ws_id; });
          stack.push_back({bumped, static_cast<std::size_t>(at - bumped_list.begin()) + 1});
        }
        out.proposals.push_back(std::move(rec));
      }
      if (!placed) out.unassigned.push_back(p.track);
    }
  }

  if (const auto violations = check_constraints(schedule); !violations.empty()) {
    throw ConstraintViolation("weapon schedule violates " +
                              std::string(to_string(violations.front().kind)) + " at " +
                              violations.front().subject);
  }
  return out;
}

WaOutcome assign_threats_to_ws(std::span<const std::string> ranked_threats,
                               const ThreatDaMatching& matching,
                               std::span<const TrackState> tracks,
                               std::span<const DefendedAsset> das,
                               std::span<const WeaponSystem> weapons, const Libraries& libraries,
                               const WeightsConfig& weights, WsSchedule& schedule, double clock) {
  std::map<std::string, std::vector<WsCandidate>> candidates;
  for (const auto& track_id : ranked_threats) {
    const auto it = matching.assignment.find(track_id);
    if (it == matching.assignment.end()) continue;
    const auto track = std::find_if(tracks.begin(), tracks.end(),
                                    [&](const TrackState& t) { return t.track_id == track_id; });
    const auto da = std::find_if(das.begin(), das.end(),
                                 [&](const DefendedAsset& d) { return d.da_id == it->second; });
    if (track == tracks.end() || da == das.end()) continue;
    candidates[track_id] = candidate_ws(*track, *da, weapons, libraries, weights, clock);
  }
  return assign_threats_to_ws(ranked_threats, candidates, schedule, clock);
}

}  // namespace tewa
