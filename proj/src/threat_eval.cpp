#include "tewa/threat_eval.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "tewa/errors.hpp"

namespace tewa {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

const TrackState* find_track(std::span<const TrackState> tracks, const std::string& id) {
  for (const auto& t : tracks) {
    if (t.track_id == id) return &t;
  }
  return nullptr;
}

const DefendedAsset* find_da(std::span<const DefendedAsset> das, const std::string& id) {
  for (const auto& d : das) {
    if (d.da_id == id) return &d;
  }
  return nullptr;
}

}  // namespace

Proximity proximity(const TrackState& track, const DefendedAsset& da) {
  const Point2 pos = track.position();
  if (da.footprint.contains(pos)) return {0.0, pos};

  const auto vel = track.velocity();
  if (!vel || vel->speed <= 0.0) return {};
  const auto ray = geometry::Ray::through(pos, vel->velocity);
  for (const auto& hit : geometry::circle_line_poi(da.footprint, ray)) {
    if (hit.t < 0.0) continue;
    const double distance = geometry::euclidean_distance(hit.point, pos);
    return {geometry::time_to_point(distance, vel->speed), hit.point};
  }
  return {};
}

double time_score(std::optional<double> time, double scale) {
  if (!time) return 0.0;
  return std::exp(-*time / scale);
}

double intent_index(const TrackState& track, const DefendedAsset& da, const WeightsConfig& weights) {
  const auto vel = track.velocity();
  const Point2 pos = track.position();
  const Vec2 to_centre = da.footprint.center - pos;
  const double centre_distance = to_centre.norm();

  double heading = 0.5;
  double closing = 0.0;
  if (vel && vel->speed > 0.0) {
    if (centre_distance == 0.0) {
      heading = 1.0;
      closing = vel->speed;
    } else {
      const double cos_theta = geometry::dot(vel->velocity, to_centre) / (vel->speed * centre_distance);
      heading = 0.5 * (1.0 + std::clamp(cos_theta, -1.0, 1.0));
      closing = geometry::dot(vel->velocity, to_centre) / centre_distance;
    }
  }
  const double closing_score = clamp01(closing / weights.reference_speed);
  const double arrival = time_score(proximity(track, da).time_to_da, weights.time_to_da_scale);

  const auto& w = weights.intent;
  return clamp01(w.heading * heading + w.closing_speed * closing_score + w.time * arrival);
}

double capability_index(const TrackState& track, const Libraries& libraries) {
  const auto& record = libraries.threat(track.threat_class);
  double scale = 1.0;
  if (const auto vel = track.velocity()) {
    scale = std::clamp(vel->speed / record.base_speed, 0.5, 1.5);
  }
  return clamp01(record.base_capability * scale);
}

double opportunity_index(double intent, double capability, const Eq3Weights& weights) {
  const double total = weights.intent + weights.capability;
  if (total <= 0.0) return clamp01(0.5 * (intent + capability));
  return clamp01((weights.intent * intent + weights.capability * capability) / total);
}

ThreatIndices evaluate_threat(const TrackState& track, const DefendedAsset& da,
                              const Libraries& libraries, const WeightsConfig& weights) {
  ThreatIndices out;
  out.intent = intent_index(track, da, weights);
  out.capability = capability_index(track, libraries);
  out.opportunity = opportunity_index(out.intent, out.capability, weights.eq3);
  const auto prox = proximity(track, da);
  out.time_to_da = prox.time_to_da;
  out.poi = prox.poi;
  return out;
}

double kill_probability(std::span<const KillProbabilityTerm> threats, const Eq3Weights& weights) {
  double product = 1.0;
  for (const auto& k : threats) {
    const double inner =
        (weights.intent * k.intent + weights.capability * k.capability + weights.load * k.load) *
        k.correlation;
    product *= 1.0 - std::pow(inner, k.shots);
  }
  return clamp01(product);
}

double kill_capability(const DefendedAsset& da, std::span<const WeaponSystem> weapons,
                       const std::string& threat_class, const Libraries& libraries) {
  double best = 0.0;
  for (const auto& ws : weapons) {
    if (ws.da_id != da.da_id || ws.condition != WeaponCondition::Up || ws.ammo <= 0) continue;
    best = std::max(best, libraries.effectiveness(ws.weapon_class, threat_class));
  }
  return best;
}

double asset_load(const DefendedAsset& da, std::span<const WeaponSystem> weapons) {
  double sum = 0.0;
  int n = 0;
  for (const auto& ws : weapons) {
    if (ws.da_id != da.da_id) continue;
    sum += ws.load;
    ++n;
  }
  return n == 0 ? 0.0 : sum / n;
}

double da_pair_weight(const TrackState& track, const ThreatIndices& indices,
                      const DefendedAsset& da, double kill_capability, double current_load,
                      const WeightsConfig& weights) {
  const auto& w = weights.da_pair;
  double weight = w.kill_capability * clamp01(kill_capability) +
                  w.time * time_score(indices.time_to_da, weights.time_to_da_scale) +
                  w.load * (1.0 - clamp01(current_load));
  if (weights.objective == DefenseMode::Preferential) weight *= da.priority;
  if (weights.objective == DefenseMode::Subtractive) weight *= track.value;
  return clamp01(weight);
}

MatchingProblem::MatchingProblem(std::size_t n_proposers, std::size_t n_acceptors)
    : proposers(n_proposers),
      acceptors(n_acceptors),
      weight(n_proposers * n_acceptors, 0.0),
      feasible(n_proposers * n_acceptors, 0),
      capacity(n_acceptors, 1) {}

MatchingResult deferred_acceptance(const MatchingProblem& problem) {
  const std::size_t n = problem.proposers;
  const std::size_t m = problem.acceptors;

  std::vector<std::vector<std::size_t>> preference(n);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t a = 0; a < m; ++a) {
      if (problem.is_feasible(p, a)) preference[p].push_back(a);
    }
    std::stable_sort(preference[p].begin(), preference[p].end(), [&](std::size_t x, std::size_t y) {
      return problem.weight_at(p, x) > problem.weight_at(p, y);
    });
  }

  // Acceptor a prefers x to y.
  auto prefers = [&](std::size_t a, std::size_t x, std::size_t y) {
    const double wx = problem.weight_at(x, a);
    const double wy = problem.weight_at(y, a);
    return wx != wy ? wx > wy : x < y;
  };

  MatchingResult result;
  result.match.assign(n, std::nullopt);
  std::vector<std::size_t> next(n, 0);
  std::vector<std::vector<std::size_t>> held(m);
  std::deque<std::size_t> free;
  for (std::size_t p = 0; p < n; ++p) free.push_back(p);

  while (!free.empty()) {
    const std::size_t p = free.front();
    free.pop_front();
    if (next[p] >= preference[p].size()) continue;
    const std::size_t a = preference[p][next[p]++];
    ++result.proposals;

    auto& slots = held[a];
    slots.push_back(p);
    result.match[p] = a;
    const auto cap = static_cast<std::size_t>(std::max(problem.capacity[a], 0));
    if (slots.size() > cap) {
      auto worst = slots.begin();
      for (auto it = slots.begin() + 1; it != slots.end(); ++it) {
        if (prefers(a, *worst, *it)) worst = it;
      }
      const std::size_t evicted = *worst;
      slots.erase(worst);
      result.match[evicted] = std::nullopt;
      free.push_back(evicted);
    }
    if (slots.size() > cap) throw ConstraintViolation("matching exceeded an acceptor quota");
  }
  return result;
}

const PairEvaluation* ThreatEvaluation::find(const std::string& track_id,
                                             const std::string& da_id) const {
  const auto t = std::lower_bound(track_ids.begin(), track_ids.end(), track_id);
  const auto d = std::lower_bound(da_ids.begin(), da_ids.end(), da_id);
  if (t == track_ids.end() || *t != track_id || d == da_ids.end() || *d != da_id) return nullptr;
  return &pair(static_cast<std::size_t>(t - track_ids.begin()),
               static_cast<std::size_t>(d - da_ids.begin()));
}

ThreatEvaluation assign_threats_to_das(std::span<const TrackState> tracks,
                                       std::span<const DefendedAsset> das,
                                       std::span<const WeaponSystem> weapons,
                                       const Libraries& libraries, const WeightsConfig& weights,
                                       const std::map<std::string, int>& capacity_in_use,
                                       const PairFilter& reachable) {
  ThreatEvaluation out;
  std::vector<const TrackState*> live;
  for (const auto& t : tracks) {
    if (t.status == TrackStatus::Alive && !t.samples.empty()) live.push_back(&t);
  }
  std::sort(live.begin(), live.end(),
            [](const TrackState* a, const TrackState* b) { return a->track_id < b->track_id; });
  std::vector<const DefendedAsset*> assets;
  for (const auto& d : das) assets.push_back(&d);
  std::sort(assets.begin(), assets.end(),
            [](const DefendedAsset* a, const DefendedAsset* b) { return a->da_id < b->da_id; });

  for (const auto* t : live) out.track_ids.push_back(t->track_id);
  for (const auto* d : assets) out.da_ids.push_back(d->da_id);

  out.problem = MatchingProblem(live.size(), assets.size());
  std::vector<double> loads;
  for (std::size_t d = 0; d < assets.size(); ++d) {
    loads.push_back(asset_load(*assets[d], weapons));
    int used = 0;
    if (const auto it = capacity_in_use.find(assets[d]->da_id); it != capacity_in_use.end()) {
      used = it->second;
    }
    out.problem.capacity[d] = std::max(assets[d]->quota - used, 0);
  }

  out.pairs.resize(live.size() * assets.size());
  for (std::size_t t = 0; t < live.size(); ++t) {
    for (std::size_t d = 0; d < assets.size(); ++d) {
      auto& pe = out.pairs[t * assets.size() + d];
      pe.indices = evaluate_threat(*live[t], *assets[d], libraries, weights);
      pe.kill_capability = kill_capability(*assets[d], weapons, live[t]->threat_class, libraries);
      pe.weight = da_pair_weight(*live[t], pe.indices, *assets[d], pe.kill_capability, loads[d], weights);
      pe.feasible = assets[d]->status == AssetStatus::FreeToFire &&
                    pe.kill_capability >= weights.capability_threshold &&
                    (!reachable || reachable(*live[t], *assets[d]));
      out.problem.weight_at(t, d) = pe.weight;
      out.problem.set_feasible(t, d, pe.feasible);
    }
  }

  const auto result = deferred_acceptance(out.problem);
  for (std::size_t t = 0; t < live.size(); ++t) {
    if (result.match[t]) {
      out.matching.assignment[out.track_ids[t]] = out.da_ids[*result.match[t]];
    } else {
      out.matching.unassigned.insert(out.track_ids[t]);
    }
  }
  return out;
}

double refined_threat_index(const ThreatIndices& indices, const TrackState& track,
                            const DefendedAsset& da, const WeightsConfig& weights) {
  if (weights.objective == DefenseMode::Subtractive) return indices.opportunity * track.value;
  return indices.opportunity * da.priority;
}

std::vector<std::string> rank_threats(const ThreatEvaluation& evaluation,
                                      std::span<const TrackState> tracks,
                                      std::span<const DefendedAsset> das,
                                      const WeightsConfig& weights) {
  struct Entry {
    double refined;
    double arrival;
    std::string track_id;
  };
  std::vector<Entry> entries;
  for (const auto& [track_id, da_id] : evaluation.matching.assignment) {
    const auto* pe = evaluation.find(track_id, da_id);
    const auto* track = find_track(tracks, track_id);
    const auto* da = find_da(das, da_id);
    if (pe == nullptr || track == nullptr || da == nullptr) continue;
    entries.push_back({refined_threat_index(pe->indices, *track, *da, weights),
                       pe->indices.time_to_da.value_or(std::numeric_limits<double>::infinity()),
                       track_id});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.refined != b.refined) return a.refined > b.refined;
    if (a.arrival != b.arrival) return a.arrival < b.arrival;
    return a.track_id < b.track_id;
  });
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (auto& e : entries) out.push_back(std::move(e.track_id));
  return out;
}

}  // namespace tewa
