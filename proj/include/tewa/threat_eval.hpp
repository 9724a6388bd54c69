#pragma once

// Stage one: score every (threat, defended asset) pair and pair threats with
// assets by weighted deferred acceptance.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tewa/domain.hpp"
#include "tewa/library.hpp"

namespace tewa {

struct Proximity {
  // Time until the track reaches the asset circle; nullopt when it never does.
  std::optional<double> time_to_da;
  std::optional<Point2> poi;
};

struct ThreatIndices {
  double intent = 0.0;
  double capability = 0.0;
  double opportunity = 0.0;
  std::optional<double> time_to_da;
  std::optional<Point2> poi;
};

Proximity proximity(const TrackState& track, const DefendedAsset& da);

double intent_index(const TrackState& track, const DefendedAsset& da, const WeightsConfig& weights);
double capability_index(const TrackState& track, const Libraries& libraries);
// Intent and capability blended with the Eq3 intent/capability weights
// renormalised over those two terms.
double opportunity_index(double intent, double capability, const Eq3Weights& weights);
ThreatIndices evaluate_threat(const TrackState& track, const DefendedAsset& da,
                              const Libraries& libraries, const WeightsConfig& weights);

// exp(-t / scale), or 0 for a target that never arrives.
double time_score(std::optional<double> time, double scale);

struct KillProbabilityTerm {
  double intent = 0.0;
  double capability = 0.0;
  double load = 0.0;
  double correlation = 0.0;
  int shots = 1;
};

// prod_k (1 - ((W_I II_k + W_CI CI_k + W_L Load) C_k)^B_k); 1 for no threats.
double kill_probability(std::span<const KillProbabilityTerm> threats, const Eq3Weights& weights);

// Best effectiveness of any serviceable weapon attached to the asset.
double kill_capability(const DefendedAsset& da, std::span<const WeaponSystem> weapons,
                       const std::string& threat_class, const Libraries& libraries);
// Mean weapon load over the asset's weapons, 0 without weapons.
double asset_load(const DefendedAsset& da, std::span<const WeaponSystem> weapons);

double da_pair_weight(const TrackState& track, const ThreatIndices& indices,
                      const DefendedAsset& da, double kill_capability, double current_load,
                      const WeightsConfig& weights);

// Many-to-one deferred acceptance over a dense weight matrix. Both sides rank
// by weight; ties go to the lower index.
struct MatchingProblem {
  std::size_t proposers = 0;
  std::size_t acceptors = 0;
  std::vector<double> weight;           // proposers x acceptors, row major
  std::vector<unsigned char> feasible;  // same shape
  std::vector<int> capacity;            // per acceptor

  MatchingProblem() = default;
  MatchingProblem(std::size_t n_proposers, std::size_t n_acceptors);

  double& weight_at(std::size_t p, std::size_t a) { return weight[p * acceptors + a]; }
  double weight_at(std::size_t p, std::size_t a) const { return weight[p * acceptors + a]; }
  bool is_feasible(std::size_t p, std::size_t a) const { return feasible[p * acceptors + a] != 0; }
  void set_feasible(std::size_t p, std::size_t a, bool f) { feasible[p * acceptors + a] = f ? 1 : 0; }
};

struct MatchingResult {
  std::vector<std::optional<std::size_t>> match;  // per proposer
  std::size_t proposals = 0;
};

MatchingResult deferred_acceptance(const MatchingProblem& problem);

struct ThreatDaMatching {
  std::map<std::string, std::string> assignment;  // track_id -> da_id
  std::set<std::string> unassigned;
};

struct PairEvaluation {
  ThreatIndices indices;
  double kill_capability = 0.0;
  double weight = 0.0;
  bool feasible = false;
};

struct ThreatEvaluation {
  ThreatDaMatching matching;
  std::vector<std::string> track_ids;  // sorted
  std::vector<std::string> da_ids;     // sorted
  std::vector<PairEvaluation> pairs;   // track x da, row major
  MatchingProblem problem;

  const PairEvaluation& pair(std::size_t t, std::size_t d) const { return pairs[t * da_ids.size() + d]; }
  const PairEvaluation* find(const std::string& track_id, const std::string& da_id) const;
};

// Extra feasibility test for a (track, asset) pair, e.g. whether any of the
// asset's weapons can actually engage the track.
using PairFilter = std::function<bool(const TrackState&, const DefendedAsset&)>;

// Pairs every Alive track with at most one asset. capacity_in_use reduces a
// DA's quota by threats it is already committed to.
ThreatEvaluation assign_threats_to_das(std::span<const TrackState> tracks,
                                       std::span<const DefendedAsset> das,
                                       std::span<const WeaponSystem> weapons,
                                       const Libraries& libraries, const WeightsConfig& weights,
                                       const std::map<std::string, int>& capacity_in_use = {},
                                       const PairFilter& reachable = {});

double refined_threat_index(const ThreatIndices& indices, const TrackState& track,
                            const DefendedAsset& da, const WeightsConfig& weights);

// Assigned tracks in processing order: refined index descending, then
// earlier arrival, then track id.
std::vector<std::string> rank_threats(const ThreatEvaluation& evaluation,
                                      std::span<const TrackState> tracks,
                                      std::span<const DefendedAsset> das,
                                      const WeightsConfig& weights);

}  // namespace tewa
