#include <doctest.h>

#include <functional>

#include "support.hpp"
#include "tewa/baseline.hpp"
#include "tewa/engine.hpp"
#include "tewa/errors.hpp"
#include "tewa/pipeline.hpp"

using namespace tewa;
using namespace tewa::testing;
using doctest::Approx;

namespace {

// Plain enumeration of every capacity-feasible schedule.
double brute_force_best(const AssignmentProblem& p) {
  const std::size_t n = p.track_ids.size();
  const std::size_t m = p.ws_ids.size();
  std::vector<int> used(m, 0);
  double best = 0.0;
  std::function<void(std::size_t, double)> go = [&](std::size_t k, double value) {
    if (k == n) {
      best = std::max(best, value);
      return;
    }
    go(k + 1, value);
    for (std::size_t j = 0; j < m; ++j) {
      const auto& w = p.weight_at(k, j);
      if (!w || used[j] >= p.capacity) continue;
      ++used[j];
      go(k + 1, value + *w);
      --used[j];
    }
  };
  go(0, 0.0);
  return best;
}

// Track states of every plan that has been flying for at least a second at t.
std::vector<TrackState> snapshot(const ScenarioSpec& spec, double t) {
  std::vector<TrackState> out;
  for (const auto& plan : spec.threats) {
    const auto a = plan.position_at(t - 1.0);
    const auto b = plan.position_at(t);
    if (t - 1.0 < plan.spawn_time || !a || !b) continue;
    TrackState s;
    s.track_id = plan.track_id;
    s.threat_class = plan.threat_class;
    s.altitude = plan.altitude;
    s.value = plan.value;
    s.samples = {{t - 1.0, *a}, {t, *b}};
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("one threat, one weapon: every method agrees") {
  const auto lib = small_library();
  std::vector<DefendedAsset> das{asset("A", {0, 0})};
  std::vector<WeaponSystem> ws{weapon("W", "A", "missile", {0, 0})};
  attach(das, ws);
  const std::vector<TrackState> tracks{moving_track("T", "jet", {0, 20}, {0, -0.3})};
  const WeightsConfig w;
  const auto two = two_stage_assign(tracks, das, ws, lib, w, 1.0);
  const auto greedy = greedy_assign(tracks, das, ws, lib, w, 1.0);
  const auto problem = build_assignment_problem(tracks, das, ws, lib, w, 1.0);
  const auto oracle = exhaustive_oracle(problem);
  REQUIRE(two.schedule.entries().size() == 1);
  REQUIRE(greedy.schedule.entries().size() == 1);
  CHECK(two.schedule.entries()[0].ws_id == greedy.schedule.entries()[0].ws_id);
  CHECK(schedule_value(problem, two.schedule) == Approx(oracle.value));
  CHECK(schedule_value(problem, greedy.schedule) == Approx(oracle.value));
}

TEST_CASE("greedy strands a threat the two-stage pass places") {
  const auto spec = load_scenario_file(scenario_path("gap_instance"));
  const auto tracks = snapshot(spec, 2.0);
  REQUIRE(tracks.size() == 2);
  const auto w = apply_mode(spec.initial_mode, spec.weights);
  const auto problem = build_assignment_problem(tracks, spec.das, spec.weapons, spec.libraries, w, 2.0);
  const auto greedy = greedy_assign(tracks, spec.das, spec.weapons, spec.libraries, w, 2.0);
  const auto two = two_stage_assign(tracks, spec.das, spec.weapons, spec.libraries, w, 2.0);
  const auto oracle = exhaustive_oracle(problem);

  CHECK(greedy.matching.unassigned.contains("T2"));
  CHECK(two.schedule.entries().size() == 2);
  CHECK(two.wa.unassigned.empty());
  const double g = schedule_value(problem, greedy.schedule);
  const double t = schedule_value(problem, two.schedule);
  CHECK(t > g);
  CHECK(oracle.value >= t - 1e-12);
  CHECK(oracle.value == Approx(brute_force_best(problem)));
}

TEST_CASE("oracle matches plain enumeration on random instances") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    CAPTURE(seed);
    const auto inst = random_instance(seed, 6, 6);
    const auto problem = build_assignment_problem(inst.tracks, inst.das, inst.weapons,
                                                  inst.libraries, inst.weights, inst.clock);
    const auto oracle = exhaustive_oracle(problem);
    CHECK(oracle.value == Approx(brute_force_best(problem)).epsilon(1e-12));
    CHECK(schedule_value(problem, oracle.schedule) == Approx(oracle.value));
    CHECK(check_constraints(oracle.schedule).empty());

    const auto greedy = greedy_assign(inst.tracks, inst.das, inst.weapons, inst.libraries,
                                      inst.weights, inst.clock);
    const auto two = two_stage_assign(inst.tracks, inst.das, inst.weapons, inst.libraries,
                                      inst.weights, inst.clock);
    CHECK(schedule_value(problem, greedy.schedule) <= oracle.value + 1e-12);
    CHECK(schedule_value(problem, two.schedule) <= oracle.value + 1e-12);
    CHECK(check_constraints(greedy.schedule).empty());
  }
}

TEST_CASE("empty problem") {
  AssignmentProblem p;
  const auto r = exhaustive_oracle(p);
  CHECK(r.value == 0.0);
  CHECK(r.schedule.empty());
}

TEST_CASE("weapon capacity bounds the oracle") {
  AssignmentProblem p;
  p.track_ids = {"a", "b", "c"};
  p.ws_ids = {"W"};
  p.weight = {0.9, 0.5, 0.7};
  const auto r = exhaustive_oracle(p);
  CHECK(r.value == Approx(1.6));
  CHECK(r.schedule.entries().size() == 2);
  CHECK(check_constraints(r.schedule).empty());
}

TEST_CASE("oracle refuses large instances") {
  AssignmentProblem p;
  for (int k = 0; k < 9; ++k) p.track_ids.push_back("T" + std::to_string(k));
  p.ws_ids = {"W"};
  p.weight.assign(9, 0.5);
  CHECK_THROWS_AS(exhaustive_oracle(p), InstanceTooLarge);
}

TEST_CASE("schedule_value rejects pairs outside the problem") {
  AssignmentProblem p;
  p.track_ids = {"a"};
  p.ws_ids = {"W"};
  p.weight = {std::nullopt};
  WsSchedule s;
  s.add({"W", "a", SlotKind::Locked});
  CHECK_THROWS_AS(schedule_value(p, s), std::invalid_argument);
}
