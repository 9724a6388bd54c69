#include "tewa/pipeline.hpp"

#include <algorithm>
#include <map>

namespace tewa {

TwoStageResult two_stage_assign(std::span<const TrackState> tracks,
                                std::span<const DefendedAsset> das,
                                std::span<const WeaponSystem> weapons, const Libraries& libraries,
                                const WeightsConfig& weights, double clock, WsSchedule schedule) {
  schedule.remove_queued();

  std::map<std::string, int> in_use;
  std::vector<TrackState> open;
  for (const auto& e : schedule.entries()) {
    const auto ws = std::find_if(weapons.begin(), weapons.end(),
                                 [&](const WeaponSystem& w) { return w.ws_id == e.ws_id; });
    if (ws != weapons.end()) ++in_use[ws->da_id];
  }
  for (const auto& t : tracks) {
    if (schedule.entry_for(t.track_id) == nullptr) open.push_back(t);
  }

  TwoStageResult out;
  const auto engageable = [&](const TrackState& t, const DefendedAsset& da) {
    return !candidate_ws(t, da, weapons, libraries, weights, clock).empty();
  };
  out.te = assign_threats_to_das(open, das, weapons, libraries, weights, in_use, engageable);
  out.ranked = rank_threats(out.te, open, das, weights);
  out.wa = assign_threats_to_ws(out.ranked, out.te.matching, open, das, weapons, libraries, weights,
                                schedule, clock);
  out.schedule = std::move(schedule);
  return out;
}

}  // namespace tewa
