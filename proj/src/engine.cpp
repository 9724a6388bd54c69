#include "tewa/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

#include "tewa/errors.hpp"
#include "tewa/pipeline.hpp"
#include "tewa/threat_eval.hpp"

namespace tewa {

using nlohmann::json;

namespace {

constexpr std::size_t kSampleHistory = 8;
constexpr double kTimeEpsilon = 1e-9;

json point_json(Point2 p) { return json::array({p.x, p.y}); }

WeaponSystem* find_weapon(std::vector<WeaponSystem>& weapons, const std::string& id) {
  for (auto& w : weapons) {
    if (w.ws_id == id) return &w;
  }
  return nullptr;
}

TrackState* find_track(std::vector<TrackState>& tracks, const std::string& id) {
  for (auto& t : tracks) {
    if (t.track_id == id) return &t;
  }
  return nullptr;
}

const DefendedAsset* find_asset(std::span<const DefendedAsset> das, const std::string& id) {
  for (const auto& d : das) {
    if (d.da_id == id) return &d;
  }
  return nullptr;
}

double da_mean_load(const DefendedAsset& da, const std::map<std::string, int>& scheduled,
                    std::span<const WeaponSystem> weapons) {
  double sum = 0.0;
  int count = 0;
  for (const auto& w : weapons) {
    if (w.da_id != da.da_id) continue;
    const auto it = scheduled.find(w.ws_id);
    sum += (it == scheduled.end() ? 0 : it->second) / static_cast<double>(kWeaponCapacity);
    ++count;
  }
  return count == 0 ? 0.0 : sum / count;
}

void push_sample(TrackState& track, double clock, Point2 position) {
  if (!track.samples.empty() && track.samples.back().time >= clock) return;
  track.samples.push_back({clock, position});
  if (track.samples.size() > kSampleHistory) track.samples.erase(track.samples.begin());
}

void log_spawn(SimState& s, TrackState& track, double spawn_time) {
  track.status = TrackStatus::Alive;
  s.spawn_time[track.track_id] = spawn_time;
  s.threat_value[track.track_id] = track.value;
  s.trace.append(s.tick, "spawn",
                 {{"track", track.track_id},
                  {"class", track.threat_class},
                  {"value", track.value},
                  {"time", spawn_time},
                  {"position", point_json(track.position())}});
}

void log_exit(SimState& s, TrackState& track) {
  track.status = TrackStatus::Exited;
  s.trace.append(s.tick, "exit", {{"track", track.track_id}});
}

void observe_scripted(SimState& s) {
  const auto& plans = s.spec->threats;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    auto& track = s.tracks[i];
    const auto& plan = plans[i];
    if (track.status == TrackStatus::Pending) {
      if (s.clock + kTimeEpsilon < plan.spawn_time) continue;
      const auto pos = plan.position_at(s.clock);
      if (!pos) {
        track.status = TrackStatus::Exited;
        s.trace.append(s.tick, "exit", {{"track", track.track_id}});
        continue;
      }
      push_sample(track, s.clock, *pos);
      log_spawn(s, track, s.clock);
    } else if (track.status == TrackStatus::Alive) {
      const auto pos = plan.position_at(s.clock);
      if (!pos) {
        log_exit(s, track);
        continue;
      }
      push_sample(track, s.clock, *pos);
      s.trace.append(s.tick, "track",
                     {{"track", track.track_id}, {"position", point_json(*pos)}});
    }
  }
}

void observe_external(SimState& s, std::span<const TrackReport> reports) {
  std::vector<const TrackReport*> sorted;
  for (const auto& r : reports) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](const TrackReport* a, const TrackReport* b) {
    return a->track_id < b->track_id;
  });
  for (const auto* r : sorted) {
    auto* track = find_track(s.tracks, r->track_id);
    if (track == nullptr) {
      if (r->exited) continue;
      TrackState t;
      t.track_id = r->track_id;
      t.threat_class = r->threat_class.empty() ? std::string(kUnknownThreatClass) : r->threat_class;
      t.altitude = r->altitude;
      t.value = r->value;
      t.status = TrackStatus::Pending;
      s.tracks.push_back(std::move(t));
      track = &s.tracks.back();
      push_sample(*track, s.clock, r->position);
      log_spawn(s, *track, s.clock);
      continue;
    }
    if (track->status != TrackStatus::Alive) continue;
    if (r->exited) {
      log_exit(s, *track);
      continue;
    }
    track->altitude = r->altitude;
    push_sample(*track, s.clock, r->position);
    s.trace.append(s.tick, "track",
                   {{"track", track->track_id}, {"position", point_json(r->position)}});
  }
}

// Frees every slot held by a track, promoting queued threats behind a lock.
void drop_track(SimState& s, const std::string& track_id, const std::string& reason) {
  const auto* entry = s.schedule.entry_for(track_id);
  while (entry != nullptr) {
    const std::string ws_id = entry->ws_id;
    if (entry->slot == SlotKind::Locked) {
      const auto promoted = s.schedule.release_lock(ws_id, s.clock);
      s.trace.append(s.tick, "release", {{"ws", ws_id}, {"track", track_id}, {"reason", reason}});
      if (promoted) s.trace.append(s.tick, "promote", {{"ws", ws_id}, {"track", *promoted}});
    } else {
      s.schedule.remove_track(track_id);
    }
    entry = s.schedule.entry_for(track_id);
  }
}

void resolve_impacts(SimState& s) {
  std::vector<EngagementEvent> due;
  std::vector<EngagementEvent> later;
  for (auto& e : s.pending_engagements) {
    (e.impact_time <= s.clock + kTimeEpsilon ? due : later).push_back(e);
  }
  std::sort(due.begin(), due.end(), [](const EngagementEvent& a, const EngagementEvent& b) {
    if (a.impact_time != b.impact_time) return a.impact_time < b.impact_time;
    return a.serial < b.serial;
  });
  s.pending_engagements = std::move(later);

  for (auto& e : due) {
    auto* track = find_track(s.tracks, e.track_id);
    const bool live = track != nullptr && track->status == TrackStatus::Alive;
    e.outcome = live ? resolve_engagement(e, s.rng) : EngagementOutcome::Miss;
    json payload = {{"ws", e.ws_id},
                    {"track", e.track_id},
                    {"serial", e.serial},
                    {"sskp", e.sskp},
                    {"outcome", std::string(to_string(e.outcome))},
                    {"time", s.clock}};
    if (!live) payload["reason"] = "target_gone";
    s.trace.append(s.tick, "resolve", std::move(payload));
    if (e.outcome == EngagementOutcome::Kill) {
      track->status = TrackStatus::Neutralized;
      s.kill_latencies.push_back(s.clock - s.spawn_time[e.track_id]);
      drop_track(s, e.track_id, "kill");
    }
    s.last_tick.resolved.push_back(e);
  }
}

void record_leaks(SimState& s) {
  std::vector<TrackState*> alive;
  for (auto& t : s.tracks) {
    if (t.status == TrackStatus::Alive && !t.samples.empty()) alive.push_back(&t);
  }
  std::sort(alive.begin(), alive.end(),
            [](const TrackState* a, const TrackState* b) { return a->track_id < b->track_id; });
  std::vector<DefendedAsset*> assets;
  for (auto& d : s.das) assets.push_back(&d);
  std::sort(assets.begin(), assets.end(),
            [](const DefendedAsset* a, const DefendedAsset* b) { return a->da_id < b->da_id; });

  for (auto* t : alive) {
    for (auto* da : assets) {
      if (!da->footprint.contains(t->position())) continue;
      t->status = TrackStatus::Leaked;
      const bool hit = s.rng.bernoulli(da->vulnerability);
      da->damaged = da->damaged || hit;
      s.trace.append(s.tick, "leak", {{"track", t->track_id}, {"da", da->da_id}, {"damaged", hit}});
      s.last_tick.leaked.push_back(t->track_id);
      drop_track(s, t->track_id, "leak");
      break;
    }
  }
}

bool has_pending_from(const SimState& s, const std::string& ws_id) {
  return std::any_of(s.pending_engagements.begin(), s.pending_engagements.end(),
                     [&](const EngagementEvent& e) { return e.ws_id == ws_id; });
}

// True while the weapon can still reach the track now or later on its
// current course.
bool still_engageable(const WeaponSystem& ws, const TrackState& track) {
  const auto sector = ws.sector();
  if (sector.contains(track.position())) return true;
  const auto vel = track.velocity();
  if (!vel || vel->speed <= 0.0) return false;
  return geometry::sector_intercept(sector, geometry::Ray::through(track.position(), vel->velocity),
                                    vel->speed)
      .has_value();
}

void housekeeping(SimState& s) {
  for (auto& t : s.tracks) {
    if (t.status != TrackStatus::Alive && s.schedule.entry_for(t.track_id) != nullptr) {
      drop_track(s, t.track_id, "inactive");
    }
  }
  std::vector<std::pair<std::string, std::string>> releases;  // ws, reason
  for (const auto& e : s.schedule.sorted()) {
    const auto* ws = find_weapon(s.weapons, e.ws_id);
    if (ws == nullptr || ws->condition != WeaponCondition::Up) {
      releases.emplace_back(e.ws_id, "weapon_down");
      continue;
    }
    if (e.slot != SlotKind::Locked || has_pending_from(s, ws->ws_id)) continue;
    if (ws->ammo <= 0) {
      releases.emplace_back(e.ws_id, "no_ammo");
      continue;
    }
    const auto* track = find_track(s.tracks, e.track_id);
    if (!still_engageable(*ws, *track)) releases.emplace_back(e.ws_id, "out_of_sector");
  }
  for (const auto& [ws_id, reason] : releases) {
    if (reason == "weapon_down") {
      if (s.schedule.scheduled_count(ws_id) == 0) continue;
      for (const auto& e : s.schedule.sorted()) {
        if (e.ws_id == ws_id) {
          s.trace.append(s.tick, "release", {{"ws", ws_id}, {"track", e.track_id}, {"reason", reason}});
        }
      }
      s.schedule.remove_weapon(ws_id);
      continue;
    }
    const auto* locked = s.schedule.locked_at(ws_id);
    if (locked == nullptr) continue;
    const std::string track_id = locked->track_id;
    const auto promoted = s.schedule.release_lock(ws_id, s.clock);
    s.trace.append(s.tick, "release", {{"ws", ws_id}, {"track", track_id}, {"reason", reason}});
    if (promoted) s.trace.append(s.tick, "promote", {{"ws", ws_id}, {"track", *promoted}});
  }
}

std::vector<TrackState> alive_tracks(const SimState& s) {
  std::vector<TrackState> out;
  for (const auto& t : s.tracks) {
    if (t.status == TrackStatus::Alive && !t.samples.empty()) out.push_back(t);
  }
  return out;
}

void log_kill_probabilities(SimState& s, const std::map<std::string, std::string>& before,
                            const std::map<std::string, std::string>& after,
                            std::span<const TrackState> alive, const WeightsConfig& weights) {
  std::set<std::string> changed;
  for (const auto& [track, da] : before) {
    const auto it = after.find(track);
    if (it == after.end() || it->second != da) changed.insert(da);
  }
  for (const auto& [track, da] : after) {
    const auto it = before.find(track);
    if (it == before.end() || it->second != da) changed.insert(da);
  }
  for (const auto& da_id : changed) {
    const auto* da = find_asset(s.das, da_id);
    if (da == nullptr) continue;
    std::vector<KillProbabilityTerm> terms;
    json threats = json::array();
    const double load = asset_load(*da, s.weapons);
    for (const auto& [track_id, assigned] : after) {
      if (assigned != da_id) continue;
      const auto t = std::find_if(alive.begin(), alive.end(),
                                  [&](const TrackState& x) { return x.track_id == track_id; });
      if (t == alive.end()) continue;
      const auto idx = evaluate_threat(*t, *da, s.spec->libraries, weights);
      terms.push_back({idx.intent, idx.capability, load,
                       kill_capability(*da, s.weapons, t->threat_class, s.spec->libraries),
                       weights.shots_per_engagement});
      threats.push_back(track_id);
    }
    s.trace.append(s.tick, "te_kp",
                   {{"da", da_id}, {"threats", threats}, {"kp", kill_probability(terms, weights.eq3)}});
  }
}

void decide(SimState& s) {
  const auto alive = alive_tracks(s);
  const auto up = static_cast<std::size_t>(
      std::count_if(s.weapons.begin(), s.weapons.end(),
                    [](const WeaponSystem& w) { return w.condition == WeaponCondition::Up; }));

  const auto started = std::chrono::steady_clock::now();
  const auto decision = select_mode(alive.size(), up, s.spec->weights);
  if (decision != ModeDecision::KeepCurrent) {
    const auto wanted =
        decision == ModeDecision::Preferential ? DefenseMode::Preferential : DefenseMode::Subtractive;
    if (wanted != s.mode) {
      s.trace.append(s.tick, "mode",
                     {{"from", std::string(to_string(s.mode))},
                      {"to", std::string(to_string(wanted))},
                      {"alive", alive.size()},
                      {"weapons_up", up}});
      s.mode = wanted;
      s.last_tick.mode_switched_to = wanted;
    }
  }
  const auto weights = apply_mode(s.mode, s.spec->weights);

  std::map<std::string, std::string> assignment;
  for (const auto& e : s.schedule.entries()) {
    if (e.slot != SlotKind::Locked) continue;
    const auto prev = s.te_assignment.find(e.track_id);
    if (prev != s.te_assignment.end()) {
      assignment[e.track_id] = prev->second;
    } else if (const auto* ws = find_weapon(s.weapons, e.ws_id)) {
      assignment[e.track_id] = ws->da_id;
    }
  }

  auto result = two_stage_assign(alive, s.das, s.weapons, s.spec->libraries, weights, s.clock,
                                 std::move(s.schedule));
  s.last_tick.decide_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  s.schedule = std::move(result.schedule);

  for (const auto& [track, da] : result.te.matching.assignment) assignment[track] = da;
  for (const auto& [track, da] : assignment) {
    const auto prev = s.te_assignment.find(track);
    if (prev != s.te_assignment.end() && prev->second == da) continue;
    json payload = {{"track", track}, {"da", da}};
    if (const auto* pe = result.te.find(track, da)) payload["weight"] = pe->weight;
    s.trace.append(s.tick, "te_assign", std::move(payload));
    s.ever_assigned_da.insert(track);
  }
  for (const auto& [track, da] : s.te_assignment) {
    if (!assignment.contains(track)) {
      s.trace.append(s.tick, "te_unassign", {{"track", track}, {"da", da}});
    }
  }
  log_kill_probabilities(s, s.te_assignment, assignment, alive, weights);
  s.te_assignment = std::move(assignment);

  for (const auto& p : result.wa.proposals) {
    if (p.bumped.empty()) continue;
    s.trace.append(s.tick, "wa_bump", {{"ws", p.ws_id}, {"track", p.track_id}, {"bumped", p.bumped}});
  }

  const auto violations = check_constraints(s.schedule);
  s.last_tick.violations = violations.size();
  if (!violations.empty()) {
    for (const auto& v : violations) {
      s.trace.append(s.tick, "violation",
                     {{"kind", std::string(to_string(v.kind))}, {"subject", v.subject}, {"detail", v.detail}});
    }
    throw ConstraintViolation("schedule violates slot constraints at tick " + std::to_string(s.tick));
  }
}

void act(SimState& s) {
  for (const auto& e : s.schedule.sorted()) {
    if (e.slot != SlotKind::Locked) continue;
    auto* ws = find_weapon(s.weapons, e.ws_id);
    auto* track = find_track(s.tracks, e.track_id);
    if (ws == nullptr || track == nullptr || track->status != TrackStatus::Alive) continue;
    if (ws->ammo <= 0 || has_pending_from(s, ws->ws_id)) continue;
    if (s.clock + kTimeEpsilon < e.since + ws->stabilization_time) continue;
    if (const auto nf = s.next_fire_time.find(ws->ws_id);
        nf != s.next_fire_time.end() && s.clock + kTimeEpsilon < nf->second) {
      continue;
    }
    const auto pos = track->position();
    if (!ws->sector().contains(pos)) continue;
    const auto vel = track->velocity();
    const auto intercept = geometry::solve_intercept(pos, vel ? vel->velocity : Vec2{}, ws->position,
                                                     ws->projectile_speed);
    if (!intercept || intercept->time_of_flight <= 0.0) continue;
    const double ground = geometry::euclidean_distance(intercept->impact_point, ws->position);
    if (ground > ws->range) continue;
    if (geometry::required_elevation(track->altitude, ground) > ws->max_elevation) continue;

    EngagementEvent ev;
    ev.ws_id = ws->ws_id;
    ev.track_id = track->track_id;
    ev.fire_time = s.clock;
    ev.impact_time = s.clock + intercept->time_of_flight;
    ev.sskp = single_shot_kill_probability(*ws, track->threat_class, s.spec->libraries);
    ev.serial = s.next_serial++;
    --ws->ammo;
    ++s.ammo_spent;
    s.next_fire_time[ws->ws_id] =
        ws->rate_of_fire > 0.0 ? s.clock + 1.0 / ws->rate_of_fire : s.clock;
    s.trace.append(s.tick, "fire",
                   {{"ws", ev.ws_id},
                    {"track", ev.track_id},
                    {"serial", ev.serial},
                    {"sskp", ev.sskp},
                    {"impact_time", ev.impact_time},
                    {"impact", point_json(intercept->impact_point)}});
    s.pending_engagements.push_back(ev);
    s.last_tick.fired.push_back(ev);
  }
}

json slot_json(const ScheduleEntry& e) {
  return {{"ws", e.ws_id},
          {"track", e.track_id},
          {"slot", e.slot == SlotKind::Locked ? "locked" : "queued"}};
}

void close_tick(SimState& s) {
  std::map<std::string, int> counts;
  for (const auto& e : s.schedule.entries()) ++counts[e.ws_id];
  for (auto& w : s.weapons) {
    const auto it = counts.find(w.ws_id);
    w.load = (it == counts.end() ? 0 : it->second) / static_cast<double>(kWeaponCapacity);
  }

  std::map<std::string, ScheduleEntry> now;
  for (const auto& e : s.schedule.entries()) now.emplace(e.track_id, e);
  for (const auto& [track, old] : s.last_schedule) {
    const auto it = now.find(track);
    if (it == now.end() || it->second.ws_id != old.ws_id || it->second.slot != old.slot) {
      s.trace.append(s.tick, "unsched", slot_json(old));
    }
  }
  for (const auto& [track, e] : now) {
    const auto it = s.last_schedule.find(track);
    if (it == s.last_schedule.end() || it->second.ws_id != e.ws_id || it->second.slot != e.slot) {
      json payload = slot_json(e);
      payload["weight"] = e.weight;
      s.trace.append(s.tick, "sched", std::move(payload));
      s.ever_scheduled_track.insert(track);
      s.ever_scheduled_weapon[e.ws_id] = true;
    }
  }
  for (const auto& [ws, c] : counts) s.max_scheduled_per_weapon = std::max(s.max_scheduled_per_weapon, c);
  s.last_schedule = std::move(now);
  s.load.sample(s.das, counts, s.weapons);
}

void run_tick(SimState& s, std::span<const TrackReport> reports) {
  s.last_tick = {};
  ++s.tick;
  s.clock = static_cast<double>(s.tick) * s.spec->dt;
  if (s.feed == TrackFeed::Scripted) {
    observe_scripted(s);
  } else {
    observe_external(s, reports);
  }
  resolve_impacts(s);
  record_leaks(s);
  housekeeping(s);
  decide(s);
  act(s);
  close_tick(s);
}

}  // namespace

std::string_view to_string(EngagementOutcome o) {
  switch (o) {
    case EngagementOutcome::Pending: return "pending";
    case EngagementOutcome::Kill: return "kill";
    case EngagementOutcome::Miss: return "miss";
  }
  return "pending";
}

std::string_view to_string(ModeDecision d) {
  switch (d) {
    case ModeDecision::Preferential: return "preferential";
    case ModeDecision::Subtractive: return "subtractive";
    case ModeDecision::KeepCurrent: return "keep_current";
  }
  return "keep_current";
}

json Metrics::to_json() const {
  return {{"total_threats", total_threats},
          {"threats_neutralized", threats_neutralized},
          {"leakers", leakers},
          {"threats_exited", threats_exited},
          {"threats_remaining", threats_remaining},
          {"threats_assigned_da", threats_assigned_da},
          {"threats_scheduled", threats_scheduled},
          {"idle_weapons", idle_weapons},
          {"max_scheduled_per_weapon", max_scheduled_per_weapon},
          {"surviving_da_value", surviving_da_value},
          {"surviving_threat_value", surviving_threat_value},
          {"ammo_spent", ammo_spent},
          {"mean_time_to_neutralize", mean_time_to_neutralize},
          {"mean_da_load", mean_da_load},
          {"ticks", ticks}};
}

void LoadAccumulator::sample(std::span<const DefendedAsset> das,
                             const std::map<std::string, int>& scheduled_per_weapon,
                             std::span<const WeaponSystem> weapons) {
  for (const auto& da : das) sums[da.da_id] += da_mean_load(da, scheduled_per_weapon, weapons);
  ++samples;
}

std::map<std::string, double> LoadAccumulator::means() const {
  std::map<std::string, double> out;
  for (const auto& [da, sum] : sums) out[da] = samples == 0 ? 0.0 : sum / static_cast<double>(samples);
  return out;
}

SimState initial_state(const ScenarioSpec& spec, std::optional<std::uint64_t> seed, TrackFeed feed) {
  try {
    spec.validate();
  } catch (const ValidationError& e) {
    throw ScenarioInvalid(e.what());
  }
  SimState s;
  s.spec = std::make_shared<const ScenarioSpec>(spec);
  s.feed = feed;
  s.das = spec.das;
  s.weapons = spec.weapons;
  s.mode = spec.initial_mode;
  const std::uint64_t used_seed = seed.value_or(spec.seed);
  s.rng = Rng(used_seed);
  s.trace.header = {kFormatVersion, scenario_hash(spec), used_seed, spec.name};
  for (const auto& d : s.das) s.load.sums[d.da_id] = 0.0;

  json planned = json::array();
  if (feed == TrackFeed::Scripted) {
    for (const auto& p : spec.threats) {
      TrackState t;
      t.track_id = p.track_id;
      t.threat_class = p.threat_class;
      t.altitude = p.altitude;
      t.value = p.value;
      t.status = TrackStatus::Pending;
      s.tracks.push_back(std::move(t));
      s.threat_value[p.track_id] = p.value;
      planned.push_back({{"track", p.track_id}, {"class", p.threat_class}, {"value", p.value}});
    }
  }
  s.trace.append(0, "start",
                 {{"threats", planned},
                  {"mode", std::string(to_string(s.mode))},
                  {"dt", spec.dt},
                  {"feed", feed == TrackFeed::Scripted ? "scripted" : "external"}});
  return s;
}

void step(SimState& state) {
  if (state.feed != TrackFeed::Scripted) {
    throw std::logic_error("externally fed state needs track reports");
  }
  run_tick(state, {});
}

void step(SimState& state, std::span<const TrackReport> reports) {
  if (state.feed != TrackFeed::External) {
    throw std::logic_error("scripted state does not take track reports");
  }
  run_tick(state, reports);
}

bool finished(const SimState& state) {
  if (state.clock + kTimeEpsilon >= state.spec->max_time) return true;
  if (state.feed == TrackFeed::External || !state.pending_engagements.empty()) return false;
  return std::all_of(state.tracks.begin(), state.tracks.end(), [](const TrackState& t) {
    return t.status != TrackStatus::Pending && t.status != TrackStatus::Alive;
  });
}

Metrics current_metrics(const SimState& s) {
  Metrics m;
  m.total_threats = static_cast<int>(s.tracks.size());
  for (const auto& t : s.tracks) {
    switch (t.status) {
      case TrackStatus::Neutralized: ++m.threats_neutralized; break;
      case TrackStatus::Leaked: ++m.leakers; break;
      case TrackStatus::Exited: ++m.threats_exited; break;
      default: ++m.threats_remaining; break;
    }
    if (t.status != TrackStatus::Neutralized) m.surviving_threat_value += t.value;
  }
  m.threats_assigned_da = static_cast<int>(s.ever_assigned_da.size());
  m.threats_scheduled = static_cast<int>(s.ever_scheduled_track.size());
  for (const auto& w : s.weapons) {
    if (!s.ever_scheduled_weapon.contains(w.ws_id)) ++m.idle_weapons;
  }
  m.max_scheduled_per_weapon = s.max_scheduled_per_weapon;
  for (const auto& d : s.das) {
    if (!d.damaged) m.surviving_da_value += d.priority;
  }
  m.ammo_spent = s.ammo_spent;
  if (!s.kill_latencies.empty()) {
    m.mean_time_to_neutralize =
        std::accumulate(s.kill_latencies.begin(), s.kill_latencies.end(), 0.0) /
        static_cast<double>(s.kill_latencies.size());
  }
  m.mean_da_load = s.load.means();
  m.ticks = s.tick;
  return m;
}

Metrics metrics_from_trace(const SimTrace& trace, const ScenarioSpec& spec) {
  std::vector<std::string> order;  // threats in first-seen order
  std::map<std::string, double> value, spawn;
  std::map<std::string, TrackStatus> status;
  std::set<std::string> damaged, assigned, scheduled_tracks, scheduled_weapons;
  std::map<std::string, ScheduleEntry> schedule;
  std::vector<double> latencies;
  int fired = 0;
  int max_per_weapon = 0;
  LoadAccumulator load;
  for (const auto& d : spec.das) load.sums[d.da_id] = 0.0;
  std::int64_t sampled_through = 0;
  std::int64_t ticks = 0;

  auto note = [&](const std::string& id, double v) {
    if (!value.contains(id)) order.push_back(id);
    value[id] = v;
    status.try_emplace(id, TrackStatus::Pending);
  };
  auto sample_until = [&](std::int64_t tick) {
    std::map<std::string, int> counts;
    for (const auto& [track, e] : schedule) ++counts[e.ws_id];
    for (; sampled_through < tick; ++sampled_through) load.sample(spec.das, counts, spec.weapons);
  };

  for (const auto& ev : trace.events) {
    sample_until(ev.tick - 1);
    ticks = std::max(ticks, ev.tick);
    const auto& p = ev.payload;
    if (ev.kind == "start") {
      for (const auto& t : p.at("threats")) note(t.at("track"), t.at("value"));
    } else if (ev.kind == "spawn") {
      note(p.at("track"), p.at("value"));
      status[p.at("track")] = TrackStatus::Alive;
      spawn[p.at("track")] = p.at("time");
    } else if (ev.kind == "exit") {
      status[p.at("track")] = TrackStatus::Exited;
    } else if (ev.kind == "leak") {
      status[p.at("track")] = TrackStatus::Leaked;
      if (p.at("damaged").get<bool>()) damaged.insert(p.at("da"));
    } else if (ev.kind == "resolve") {
      if (p.at("outcome") == "kill") {
        const std::string id = p.at("track");
        status[id] = TrackStatus::Neutralized;
        latencies.push_back(p.at("time").get<double>() - spawn[id]);
      }
    } else if (ev.kind == "fire") {
      ++fired;
    } else if (ev.kind == "te_assign") {
      assigned.insert(p.at("track"));
    } else if (ev.kind == "sched" || ev.kind == "unsched") {
      const std::string track = p.at("track");
      if (ev.kind == "unsched") {
        schedule.erase(track);
        continue;
      }
      schedule[track] = {p.at("ws"), track,
                         p.at("slot") == "locked" ? SlotKind::Locked : SlotKind::Queued, 0.0, 0.0};
      scheduled_tracks.insert(track);
      scheduled_weapons.insert(p.at("ws"));
      std::map<std::string, int> counts;
      for (const auto& [t, e] : schedule) ++counts[e.ws_id];
      for (const auto& [w, c] : counts) max_per_weapon = std::max(max_per_weapon, c);
    } else if (ev.kind == "end") {
      ticks = p.at("ticks");
    }
  }
  sample_until(ticks);

  Metrics m;
  m.total_threats = static_cast<int>(order.size());
  for (const auto& id : order) {
    switch (status[id]) {
      case TrackStatus::Neutralized: ++m.threats_neutralized; break;
      case TrackStatus::Leaked: ++m.leakers; break;
      case TrackStatus::Exited: ++m.threats_exited; break;
      default: ++m.threats_remaining; break;
    }
    if (status[id] != TrackStatus::Neutralized) m.surviving_threat_value += value[id];
  }
  m.threats_assigned_da = static_cast<int>(assigned.size());
  m.threats_scheduled = static_cast<int>(scheduled_tracks.size());
  for (const auto& w : spec.weapons) {
    if (!scheduled_weapons.contains(w.ws_id)) ++m.idle_weapons;
  }
  m.max_scheduled_per_weapon = max_per_weapon;
  for (const auto& d : spec.das) {
    if (!damaged.contains(d.da_id)) m.surviving_da_value += d.priority;
  }
  m.ammo_spent = fired;
  if (!latencies.empty()) {
    m.mean_time_to_neutralize = std::accumulate(latencies.begin(), latencies.end(), 0.0) /
                                static_cast<double>(latencies.size());
  }
  m.mean_da_load = load.means();
  m.ticks = ticks;
  return m;
}

ModeDecision select_mode(std::size_t alive_threats, std::size_t up_weapons,
                         const WeightsConfig& weights) {
  if (weights.mode_override) {
    return *weights.mode_override == DefenseMode::Preferential ? ModeDecision::Preferential
                                                               : ModeDecision::Subtractive;
  }
  if (alive_threats < up_weapons) return ModeDecision::Subtractive;
  if (alive_threats > up_weapons) return ModeDecision::Preferential;
  return ModeDecision::KeepCurrent;
}

WeightsConfig apply_mode(DefenseMode mode, WeightsConfig w) {
  w.objective = mode;
  auto renorm = [](std::initializer_list<double*> group) {
    double sum = 0.0;
    for (double* x : group) sum += *x;
    if (sum <= 0.0) return;
    for (double* x : group) *x /= sum;
  };
  renorm({&w.eq3.intent, &w.eq3.capability, &w.eq3.load});
  renorm({&w.intent.heading, &w.intent.closing_speed, &w.intent.time});
  renorm({&w.da_pair.kill_capability, &w.da_pair.time, &w.da_pair.load});
  renorm({&w.ws_pair.time, &w.ws_pair.elevation, &w.ws_pair.lethality, &w.ws_pair.stabilization,
          &w.ws_pair.rate_of_fire});
  return w;
}

double single_shot_kill_probability(const WeaponSystem& ws, const std::string& threat_class,
                                    const Libraries& libraries) {
  return std::clamp(ws.lethality_index * libraries.effectiveness(ws.weapon_class, threat_class),
                    0.0, 1.0);
}

EngagementOutcome resolve_engagement(const EngagementEvent& event, Rng& rng) {
  return rng.bernoulli(event.sskp) ? EngagementOutcome::Kill : EngagementOutcome::Miss;
}

RunResult run_scenario(const ScenarioSpec& spec, std::optional<std::uint64_t> seed) {
  const auto started = std::chrono::steady_clock::now();
  auto state = initial_state(spec, seed);
  RunResult out;
  while (!finished(state)) {
    step(state);
    out.stats.max_decide_ms = std::max(out.stats.max_decide_ms, state.last_tick.decide_ms);
    out.stats.violations += state.last_tick.violations;
    out.stats.modes.push_back(state.mode);
    const bool any_alive = std::any_of(state.tracks.begin(), state.tracks.end(), [](const TrackState& t) {
      return t.status == TrackStatus::Alive;
    });
    if (!out.stats.first_decided_mode && any_alive) out.stats.first_decided_mode = state.mode;
  }
  state.trace.append(state.tick, "end", {{"ticks", state.tick}});
  out.metrics = current_metrics(state);
  out.trace = std::move(state.trace);
  out.stats.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return out;
}

}  // namespace tewa
