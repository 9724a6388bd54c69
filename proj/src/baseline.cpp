#include "tewa/baseline.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>

#include "tewa/errors.hpp"

namespace tewa {

namespace {

std::vector<const TrackState*> live_tracks(std::span<const TrackState> tracks) {
  std::vector<const TrackState*> out;
  for (const auto& t : tracks) {
    if (t.status == TrackStatus::Alive && !t.samples.empty()) out.push_back(&t);
  }
  std::sort(out.begin(), out.end(),
            [](const TrackState* a, const TrackState* b) { return a->track_id < b->track_id; });
  return out;
}

std::vector<const DefendedAsset*> sorted_assets(std::span<const DefendedAsset> das) {
  std::vector<const DefendedAsset*> out;
  for (const auto& d : das) out.push_back(&d);
  std::sort(out.begin(), out.end(),
            [](const DefendedAsset* a, const DefendedAsset* b) { return a->da_id < b->da_id; });
  return out;
}

bool asset_accepts(const DefendedAsset& da, const TrackState& track,
                   std::span<const WeaponSystem> weapons, const Libraries& libraries,
                   const WeightsConfig& weights) {
  return da.status == AssetStatus::FreeToFire &&
         kill_capability(da, weapons, track.threat_class, libraries) >= weights.capability_threshold;
}

}  // namespace

AssignmentProblem build_assignment_problem(std::span<const TrackState> tracks,
                                           std::span<const DefendedAsset> das,
                                           std::span<const WeaponSystem> weapons,
                                           const Libraries& libraries,
                                           const WeightsConfig& weights, double clock) {
  AssignmentProblem p;
  const auto live = live_tracks(tracks);
  for (const auto* t : live) p.track_ids.push_back(t->track_id);
  std::vector<const WeaponSystem*> ws_sorted;
  for (const auto& w : weapons) ws_sorted.push_back(&w);
  std::sort(ws_sorted.begin(), ws_sorted.end(),
            [](const WeaponSystem* a, const WeaponSystem* b) { return a->ws_id < b->ws_id; });
  for (const auto* w : ws_sorted) p.ws_ids.push_back(w->ws_id);
  p.weight.assign(p.track_ids.size() * p.ws_ids.size(), std::nullopt);

  for (std::size_t k = 0; k < live.size(); ++k) {
    for (const auto* da : sorted_assets(das)) {
      if (!asset_accepts(*da, *live[k], weapons, libraries, weights)) continue;
      for (const auto& c : candidate_ws(*live[k], *da, weapons, libraries, weights, clock)) {
        const auto j = std::find(p.ws_ids.begin(), p.ws_ids.end(), c.ws_id) - p.ws_ids.begin();
        p.weight[k * p.ws_ids.size() + static_cast<std::size_t>(j)] = c.pair_weight;
      }
    }
  }
  return p;
}

double schedule_value(const AssignmentProblem& problem, const WsSchedule& schedule) {
  double total = 0.0;
  for (const auto& e : schedule.entries()) {
    const auto k = std::find(problem.track_ids.begin(), problem.track_ids.end(), e.track_id);
    const auto j = std::find(problem.ws_ids.begin(), problem.ws_ids.end(), e.ws_id);
    if (k == problem.track_ids.end() || j == problem.ws_ids.end()) {
      throw std::invalid_argument("schedule entry outside the problem: " + e.track_id + "@" + e.ws_id);
    }
    const auto& w = problem.weight_at(static_cast<std::size_t>(k - problem.track_ids.begin()),
                                      static_cast<std::size_t>(j - problem.ws_ids.begin()));
    if (!w) throw std::invalid_argument("infeasible pair scheduled: " + e.track_id + "@" + e.ws_id);
    total += *w;
  }
  return total;
}

GreedyResult greedy_assign(std::span<const TrackState> tracks, std::span<const DefendedAsset> das,
                           std::span<const WeaponSystem> weapons, const Libraries& libraries,
                           const WeightsConfig& weights, double clock) {
  const auto assets = sorted_assets(das);
  auto live = live_tracks(tracks);

  std::map<std::string, double> raw;
  for (const auto* t : live) {
    double best = 0.0;
    for (const auto* da : assets) {
      best = std::max(best, evaluate_threat(*t, *da, libraries, weights).opportunity);
    }
    raw[t->track_id] = best;
  }
  std::stable_sort(live.begin(), live.end(), [&](const TrackState* a, const TrackState* b) {
    return raw[a->track_id] > raw[b->track_id];
  });

  GreedyResult out;
  std::map<std::string, int> da_used;
  for (const auto* t : live) {
    const DefendedAsset* best_da = nullptr;
    std::optional<WsCandidate> best;
    for (const auto* da : assets) {
      if (da_used[da->da_id] >= da->quota) continue;
      if (!asset_accepts(*da, *t, weapons, libraries, weights)) continue;
      for (const auto& c : candidate_ws(*t, *da, weapons, libraries, weights, clock)) {
        if (out.schedule.scheduled_count(c.ws_id) >= kWeaponCapacity) continue;
        if (!best || c.pair_weight > best->pair_weight ||
            (c.pair_weight == best->pair_weight && c.ws_id < best->ws_id)) {
          best = c;
          best_da = da;
        }
      }
    }
    if (!best) {
      out.matching.unassigned.insert(t->track_id);
      continue;
    }
    const auto slot = out.schedule.locked_at(best->ws_id) ? SlotKind::Queued : SlotKind::Locked;
    out.schedule.add({best->ws_id, t->track_id, slot, best->pair_weight, clock});
    out.matching.assignment[t->track_id] = best_da->da_id;
    ++da_used[best_da->da_id];
  }
  return out;
}

OracleResult exhaustive_oracle(const AssignmentProblem& problem) {
  const std::size_t n = problem.track_ids.size();
  const std::size_t m = problem.ws_ids.size();
  if (n > kOracleMaxThreats || m > kOracleMaxWeapons) {
    throw InstanceTooLarge("exhaustive oracle is limited to 8 threats and 8 weapons");
  }

  // Candidate weapons per threat, heaviest first, and an optimistic bound on
  // what the remaining threats can still add.
  std::vector<std::vector<std::size_t>> options(n);
  std::vector<double> best_remaining(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < m; ++j) {
      if (problem.weight_at(k, j)) options[k].push_back(j);
    }
    std::stable_sort(options[k].begin(), options[k].end(), [&](std::size_t a, std::size_t b) {
      return *problem.weight_at(k, a) > *problem.weight_at(k, b);
    });
  }
  for (std::size_t k = n; k-- > 0;) {
    const double top = options[k].empty() ? 0.0 : *problem.weight_at(k, options[k].front());
    best_remaining[k] = best_remaining[k + 1] + top;
  }

  OracleResult result;
  double best_value = -1.0;
  std::vector<std::optional<std::size_t>> current(n), best(n);
  std::vector<int> used(m, 0);

  auto search = [&](auto&& self, std::size_t k, double value) -> void {
    ++result.nodes;
    if (k == n) {
      if (value > best_value) {
        best_value = value;
        best = current;
      }
      return;
    }
    if (value + best_remaining[k] <= best_value) return;
    for (std::size_t j : options[k]) {
      if (used[j] >= problem.capacity) continue;
      ++used[j];
      current[k] = j;
      self(self, k + 1, value + *problem.weight_at(k, j));
      current[k] = std::nullopt;
      --used[j];
    }
    self(self, k + 1, value);
  };
  search(search, 0, 0.0);

  result.value = std::max(best_value, 0.0);
  std::vector<int> slots(m, 0);
  for (std::size_t k = 0; k < n; ++k) {
    if (!best[k]) continue;
    const std::size_t j = *best[k];
    result.schedule.add({problem.ws_ids[j], problem.track_ids[k],
                         slots[j]++ == 0 ? SlotKind::Locked : SlotKind::Queued,
                         *problem.weight_at(k, j), 0.0});
  }
  return result;
}

OracleResult exhaustive_oracle(std::span<const TrackState> tracks,
                               std::span<const DefendedAsset> das,
                               std::span<const WeaponSystem> weapons, const Libraries& libraries,
                               const WeightsConfig& weights, double clock) {
  return exhaustive_oracle(build_assignment_problem(tracks, das, weapons, libraries, weights, clock));
}

}  // namespace tewa
