// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "support.hpp"
#include "tewa/baseline.hpp"
#include "tewa/engine.hpp"
#include "tewa/geometry.hpp"
#include "tewa/pipeline.hpp"
#include "tewa/threat_eval.hpp"
#include "wire.hpp"

using namespace tewa;
using namespace tewa::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Steps a scenario to completion, checking the slot rules after every tick.
struct Walk {
  SimState state;
  std::size_t violations = 0;
  std::size_t ticks_checked = 0;
  double max_decide_ms = 0.0;
  std::optional<DefenseMode> first_mode;
  std::set<DefenseMode> modes;
  double wall_ms = 0.0;

  explicit Walk(const ScenarioSpec& spec) : state(initial_state(spec)) {
    const auto t0 = Clock::now();
    while (!finished(state)) {
      step(state);
      violations += check_constraints(state.schedule).size() + state.last_tick.violations;
      ++ticks_checked;
      max_decide_ms = std::max(max_decide_ms, state.last_tick.decide_ms);
      const bool decided = std::any_of(state.tracks.begin(), state.tracks.end(),
                                       [](const TrackState& t) { return t.status == TrackStatus::Alive; });
      if (decided) {
        if (!first_mode) first_mode = state.mode;
        modes.insert(state.mode);
      }
    }
    wall_ms = ms_since(t0);
  }
};

std::vector<ScenarioSpec> bundled_scenarios() {
  std::vector<ScenarioSpec> out;
  for (const auto& entry : std::filesystem::directory_iterator(data_dir() / "scenarios")) {
    if (entry.path().extension() == ".json") out.push_back(load_scenario_file(entry.path()));
  }
  std::sort(out.begin(), out.end(),
            [](const ScenarioSpec& a, const ScenarioSpec& b) { return a.name < b.name; });
  return out;
}

Outcome table_rows() {
  std::ostringstream why;
  bool ok = true;
  auto require = [&](bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      why << " [" << what << "]";
    }
  };

  {
    const auto spec = load_scenario_file(scenario_path("table1_k5"));
    const Walk w(spec);
    const auto m = current_metrics(w.state);
    require(spec.threats.size() == 5 && spec.das.size() == 10 && spec.weapons.size() == 10, "K5 shape");
    require(m.threats_assigned_da == 5, "K5 all assigned to DAs");
    require(m.threats_scheduled == 5, "K5 all scheduled");
    require(m.idle_weapons >= 1, "K5 idle weapon");
    require(w.violations == 0, "K5 violations");
    require(w.first_mode == DefenseMode::Subtractive && w.modes.size() == 1, "K5 mode");
    require(w.max_decide_ms < 100.0, "K5 decide time");
    // Every logged pairing must be capability-feasible.
    std::map<std::string, std::string> cls;
    for (const auto& t : spec.threats) cls[t.track_id] = t.threat_class;
    for (const auto& e : w.state.trace.events) {
      if (e.kind == "te_assign") {
        const auto* da = &*std::find_if(spec.das.begin(), spec.das.end(), [&](const DefendedAsset& d) {
          return d.da_id == e.payload["da"];
        });
        require(kill_capability(*da, spec.weapons, cls[e.payload["track"]], spec.libraries) >=
                    spec.weights.capability_threshold,
                "K5 infeasible DA pairing");
      } else if (e.kind == "sched") {
        const auto* ws = &*std::find_if(spec.weapons.begin(), spec.weapons.end(),
                                        [&](const WeaponSystem& x) { return x.ws_id == e.payload["ws"]; });
        require(spec.libraries.effectiveness(ws->weapon_class, cls[e.payload["track"]]) >=
                    spec.weights.capability_threshold,
                "K5 infeasible WS pairing");
      }
    }
    why << fmt(" K5: assigned %d, scheduled %d, idle %d, max decide %.2f ms;", m.threats_assigned_da,
               m.threats_scheduled, m.idle_weapons, w.max_decide_ms);
  }
  {
    const auto spec = load_scenario_file(scenario_path("table1_k50"));
    const auto t0 = Clock::now();
    const auto run = run_scenario(spec);
    const double wall = ms_since(t0);
    const auto& m = run.metrics;
    require(spec.threats.size() == 50 && spec.das.size() == 10 && spec.weapons.size() == 10, "K50 shape");
    require(m.threats_scheduled == 50, "K50 all scheduled");
    require(m.max_scheduled_per_weapon <= 2, "K50 per-weapon cap");
    require(run.stats.first_decided_mode == DefenseMode::Preferential, "K50 mode");
    require(run.stats.violations == 0, "K50 violations");
    require(wall < 5000.0, "K50 wall time");
    why << fmt(" K50: scheduled %d, max per weapon %d, run %.0f ms", m.threats_scheduled,
               m.max_scheduled_per_weapon, wall);
  }
  return {ok, why.str()};
}

Outcome geometry_residuals() {
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> u(-20, 20);
  double worst = 0.0;
  int points = 0;
  for (int i = 0; i < 1000; ++i) {
    const geometry::Circle c{{u(gen), u(gen)}, 0.5 + std::abs(u(gen))};
    // Aim near the circle so most rays hit it.
    const geometry::Point2 origin{u(gen), u(gen)};
    const geometry::Point2 target{c.center.x + 0.8 * c.radius * u(gen) / 20,
                                  c.center.y + 0.8 * c.radius * u(gen) / 20};
    const auto ray = geometry::Ray::through(origin, target - origin);
    for (const auto& hit : geometry::circle_line_poi(c, ray)) {
      const double dx = hit.point.x - c.center.x;
      const double dy = hit.point.y - c.center.y;
      worst = std::max(worst, std::abs(dx * dx + dy * dy - c.radius * c.radius));
      ++points;
    }
  }

  std::uniform_real_distribution<double> v(-1, 1);
  double worst_sector = 0.0;
  int mismatched = 0;
  int crossings = 0;
  for (int i = 0; i < 1000; ++i) {
    // The excluded wedge stays wide enough for the 1 m sampling step to see it.
    const double sweep = v(gen) > 0.8 ? geometry::kTwoPi : (0.2 + 0.75 * std::abs(v(gen))) * geometry::kTwoPi;
    const geometry::Sector s{{{10 * v(gen), 10 * v(gen)}, 3 + 4 * std::abs(v(gen))},
                             geometry::normalize_angle(4 * v(gen)), sweep};
    const geometry::Point2 origin{s.circle.center.x + 15 * v(gen), s.circle.center.y + 15 * v(gen)};
    const geometry::Vec2 aim = (s.circle.center + geometry::Vec2{4 * v(gen), 4 * v(gen)}) - origin;
    const auto ray = geometry::Ray::through(origin, aim);
    const auto got = geometry::sector_intercept(s, ray, 1.0);
    const auto want = dense_sector_crossing(s, origin.x, origin.y, ray.direction().x, ray.direction().y);
    if (got.has_value() != want.has_value()) {
      ++mismatched;
      continue;
    }
    if (!got) continue;
    ++crossings;
    worst_sector = std::max({worst_sector, std::abs(got->entry_time - want->first),
                             std::abs(got->exit_time - want->second)});
  }
  return {worst < 1e-9 && mismatched == 0 && worst_sector < 1e-3 && points > 1000,
          fmt("%d POIs, max residual %.2e; %d sector crossings, %d mismatches, max gap %.2e km", points,
              worst, crossings, mismatched, worst_sector)};
}

Outcome matching_stability() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(202);
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> n(1, 8);
  std::size_t blocking = 0;
  std::size_t over_quota = 0;
  for (int round = 0; round < 1000; ++round) {
    MatchingProblem p(n(gen), n(gen));
    // Coarse weights so ties occur.
    for (auto& x : p.weight) x = std::round(u(gen) * 10) / 10;
    for (auto& f : p.feasible) f = u(gen) < 0.75;
    for (auto& c : p.capacity) c = 1 + static_cast<int>(u(gen) * 3);
    const auto r = deferred_acceptance(p);
    blocking += blocking_pairs(p, r).size();
    std::vector<int> held(p.acceptors, 0);
    for (const auto& m : r.match) {
      if (m) ++held[*m];
    }
    for (std::size_t a = 0; a < p.acceptors; ++a) over_quota += held[a] > p.capacity[a];
  }
  const double ms = ms_since(t0);
  return {blocking == 0 && over_quota == 0 && ms < 10000.0,
          fmt("1000 instances, %zu blocking pairs, %zu quota breaches, %.0f ms", blocking, over_quota, ms)};
}

Outcome constraint_invariance() {
  std::size_t violations = 0;
  std::size_t ticks = 0;
  int runs = 0;
  for (const auto& spec : bundled_scenarios()) {
    const Walk w(spec);
    violations += w.violations;
    ticks += w.ticks_checked;
    ++runs;
  }
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const Walk w(random_scenario(seed));
    violations += w.violations;
    ticks += w.ticks_checked;
    ++runs;
  }
  return {violations == 0, fmt("%d runs, %zu ticks checked, %zu violations", runs, ticks, violations)};
}

Outcome kill_probability_properties() {
  const Eq3Weights w;
  bool ok = true;
  std::string why;
  const KillProbabilityTerm half{0.5, 0.5, 0.5, 1.0, 1};
  const std::vector<KillProbabilityTerm> one{half};
  const std::vector<KillProbabilityTerm> two{half, half};
  if (kill_probability(one, w) != 0.5 || kill_probability(two, w) != 0.25) {
    ok = false;
    why += " [hand values]";
  }

  std::mt19937_64 gen(303);
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> count(1, 5);
  std::uniform_int_distribution<int> shots(1, 3);
  int out_of_range = 0;
  int increases = 0;
  for (int i = 0; i < 10000; ++i) {
    std::vector<KillProbabilityTerm> terms(count(gen));
    for (auto& t : terms) t = {u(gen), u(gen), u(gen), u(gen), shots(gen)};
    const double base = kill_probability(terms, w);
    if (!(base >= 0.0 && base <= 1.0)) ++out_of_range;
    auto bumped = terms;
    auto& t = bumped[gen() % bumped.size()];
    const double delta = u(gen);
    switch (gen() % 4) {
      case 0: t.intent = std::min(1.0, t.intent + delta); break;
      case 1: t.capability = std::min(1.0, t.capability + delta); break;
      case 2: t.load = std::min(1.0, t.load + delta); break;
      default: t.correlation = std::min(1.0, t.correlation + delta); break;
    }
    if (kill_probability(bumped, w) > base + 1e-15) ++increases;
  }
  if (out_of_range || increases) ok = false;
  return {ok, fmt("hand values 0.5/0.25; 10000 samples, %d out of [0,1], %d increases", out_of_range,
                  increases) +
                  why};
}

Outcome optimality_gap() {
  int at_least_greedy = 0;
  double ratio_sum = 0.0;
  int n = 0;
  for (std::uint64_t seed = 1000; seed < 1100; ++seed) {
    const auto inst = random_instance(seed, 8, 8);
    const auto problem = build_assignment_problem(inst.tracks, inst.das, inst.weapons, inst.libraries,
                                                  inst.weights, inst.clock);
    const double oracle = exhaustive_oracle(problem).value;
    const double two = schedule_value(
        problem, two_stage_assign(inst.tracks, inst.das, inst.weapons, inst.libraries, inst.weights,
                                  inst.clock)
                     .schedule);
    const double greedy = schedule_value(
        problem,
        greedy_assign(inst.tracks, inst.das, inst.weapons, inst.libraries, inst.weights, inst.clock)
            .schedule);
    at_least_greedy += two >= greedy - 1e-12;
    ratio_sum += oracle > 0.0 ? two / oracle : 1.0;
    ++n;
  }
  const double mean_ratio = ratio_sum / n;
  return {at_least_greedy >= 90 && mean_ratio >= 0.95,
          fmt("two-stage >= greedy in %d/%d, mean two-stage/oracle %.4f", at_least_greedy, n, mean_ratio)};
}

Outcome determinism() {
  int identical = 0;
  int runs = 0;
  for (const auto& spec : bundled_scenarios()) {
    ++runs;
    identical += write_trace(run_scenario(spec).trace) == write_trace(run_scenario(spec).trace);
  }
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ++runs;
    const auto spec = random_scenario(seed);
    identical += write_trace(run_scenario(spec).trace) == write_trace(run_scenario(spec).trace);
  }
  int wire_matches = 0;
  int wire_runs = 0;
  std::size_t decisions = 0;
  for (const auto* name : {"table1_k5", "table1_k10", "gap_instance"}) {
    ++wire_runs;
    const auto spec = load_scenario_file(scenario_path(name));
    const auto local = run_scenario(spec, 42);
    const auto remote = run_over_wire(spec, 42, local.metrics.ticks);
    const auto a = decision_events(local.trace);
    wire_matches += a == decision_events(remote);
    decisions += a.size();
  }
  return {identical == runs && wire_matches == wire_runs,
          fmt("%d/%d traces byte-identical; %d/%d wire runs match (%zu decisions)", identical, runs,
              wire_matches, wire_runs, decisions)};
}

Outcome intercept_accuracy() {
  std::mt19937_64 gen(808);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0.0;
  int solved = 0;
  for (int i = 0; i < 1000; ++i) {
    const geometry::Point2 target{20 * u(gen), 20 * u(gen)};
    const geometry::Vec2 v{0.6 * u(gen), 0.6 * u(gen)};
    const geometry::Point2 shooter{5 * u(gen), 5 * u(gen)};
    const double speed = 0.7 + std::abs(u(gen));
    const auto s = geometry::solve_intercept(target, v, shooter, speed);
    if (!s) continue;
    ++solved;
    const double t = s->time_of_flight;
    const geometry::Vec2 aim = s->impact_point - shooter;
    const geometry::Point2 projectile = shooter + aim * (speed * t / aim.norm());
    worst = std::max(worst, geometry::euclidean_distance(projectile, target + v * t));
  }
  return {worst < 1e-6 && solved > 900, fmt("%d/1000 solvable, max miss %.2e km", solved, worst)};
}

Outcome monte_carlo() {
  Rng rng(909);
  EngagementEvent e;
  e.sskp = 0.7;
  int kills = 0;
  for (int i = 0; i < 10000; ++i) kills += resolve_engagement(e, rng) == EngagementOutcome::Kill;
  const double rate = kills / 10000.0;
  return {rate >= 0.68 && rate <= 0.72, fmt("kill rate %.4f", rate)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"table scenarios", table_rows},
      {"geometry residuals", geometry_residuals},
      {"matching stability", matching_stability},
      {"constraint invariance", constraint_invariance},
      {"kill probability properties", kill_probability_properties},
      {"optimality gap", optimality_gap},
      {"determinism", determinism},
      {"intercept accuracy", intercept_accuracy},
      {"monte carlo resolution", monte_carlo},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", index - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
