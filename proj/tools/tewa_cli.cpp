// Command-line front end: run, batch, compare, serve, validate.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "tewa/baseline.hpp"
#include "tewa/engine.hpp"
#include "tewa/errors.hpp"
#include "tewa/pipeline.hpp"
#include "tewa/protocol.hpp"
#include "tewa/scenario.hpp"
#include "tewa/trace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw tewa::Error("cannot write '" + path.string() + "'");
  out << text;
}

void print_metrics_table(std::ostream& os, const std::string& title, const tewa::Metrics& m) {
  os << title << "\n";
  auto row = [&](const std::string& k, const auto& v) {
    os << "  " << std::left << std::setw(26) << k << v << "\n";
  };
  row("threats", m.total_threats);
  row("assigned to DA", m.threats_assigned_da);
  row("scheduled on WS", m.threats_scheduled);
  row("neutralized", m.threats_neutralized);
  row("leakers", m.leakers);
  row("exited", m.threats_exited);
  row("remaining", m.threats_remaining);
  row("idle weapons", m.idle_weapons);
  row("max per weapon", m.max_scheduled_per_weapon);
  row("surviving DA value", m.surviving_da_value);
  row("surviving threat value", m.surviving_threat_value);
  row("ammo spent", m.ammo_spent);
  row("mean time to kill (s)", m.mean_time_to_neutralize);
  row("ticks", m.ticks);
  for (const auto& [da, load] : m.mean_da_load) row("mean load " + da, load);
}

int cmd_validate(const std::string& path) {
  const auto spec = tewa::load_scenario_file(path);
  std::cout << "ok: " << (spec.name.empty() ? path : spec.name) << " (" << spec.das.size()
            << " DAs, " << spec.weapons.size() << " weapons, " << spec.threats.size()
            << " threats)\n";
  return 0;
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, const std::string& trace_out,
            const std::string& metrics_out) {
  const auto spec = tewa::load_scenario_file(path);
  const auto result = tewa::run_scenario(spec, seed);
  if (!trace_out.empty()) write_file(trace_out, tewa::write_trace(result.trace));
  const auto doc = result.metrics.to_json();
  if (!metrics_out.empty()) write_file(metrics_out, doc.dump(2) + "\n");
  print_metrics_table(std::cout, "scenario " + spec.name, result.metrics);
  std::cout << "  " << std::left << std::setw(26) << "mode at first decision"
            << (result.stats.first_decided_mode ? tewa::to_string(*result.stats.first_decided_mode)
                                                 : std::string_view("none"))
            << "\n";
  std::cout << "  " << std::setw(26) << "max decide time (ms)" << result.stats.max_decide_ms << "\n";
  std::cout << doc.dump() << "\n";
  return 0;
}

struct BatchRow {
  std::string file;
  std::optional<tewa::Metrics> metrics;
  std::string error;
};

int cmd_batch(const std::string& dir, bool summary, std::optional<std::uint64_t> seed) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  // Library files and other JSON without a deployment are skipped.
  std::vector<fs::path> scenarios;
  for (const auto& f : files) {
    try {
      const auto doc = json::parse(tewa::read_text_file(f));
      if (doc.is_object() && doc.contains("das") && doc.contains("weapons")) scenarios.push_back(f);
    } catch (const std::exception&) {
      scenarios.push_back(f);  // let the run report the parse error
    }
  }

  std::vector<BatchRow> rows(scenarios.size());
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::size_t next = 0;
  while (next < scenarios.size()) {
    std::vector<std::future<void>> running;
    for (std::size_t w = 0; w < workers && next < scenarios.size(); ++w, ++next) {
      running.push_back(std::async(std::launch::async, [&, i = next] {
        rows[i].file = scenarios[i].filename().string();
        try {
          rows[i].metrics = tewa::run_scenario(tewa::load_scenario_file(scenarios[i]), seed).metrics;
        } catch (const std::exception& e) {
          rows[i].error = e.what();
        }
      }));
    }
    for (auto& f : running) f.get();
  }

  int failures = 0;
  tewa::Metrics total;
  json out = json::array();
  for (const auto& r : rows) {
    if (!r.metrics) {
      ++failures;
      std::cerr << r.file << ": " << r.error << "\n";
      out.push_back({{"file", r.file}, {"error", r.error}});
      continue;
    }
    const auto& m = *r.metrics;
    if (!summary) print_metrics_table(std::cout, r.file, m);
    total.total_threats += m.total_threats;
    total.threats_neutralized += m.threats_neutralized;
    total.leakers += m.leakers;
    total.threats_exited += m.threats_exited;
    total.threats_remaining += m.threats_remaining;
    total.threats_assigned_da += m.threats_assigned_da;
    total.threats_scheduled += m.threats_scheduled;
    total.idle_weapons += m.idle_weapons;
    total.max_scheduled_per_weapon = std::max(total.max_scheduled_per_weapon, m.max_scheduled_per_weapon);
    total.surviving_da_value += m.surviving_da_value;
    total.surviving_threat_value += m.surviving_threat_value;
    total.ammo_spent += m.ammo_spent;
    total.ticks += m.ticks;
    out.push_back({{"file", r.file}, {"metrics", m.to_json()}});
  }
  if (summary) {
    std::cout << std::left << std::setw(24) << "scenario" << std::setw(9) << "threats" << std::setw(9)
              << "killed" << std::setw(9) << "leaked" << std::setw(8) << "ammo" << "DA value\n";
    for (const auto& r : rows) {
      if (!r.metrics) continue;
      std::cout << std::setw(24) << r.file << std::setw(9) << r.metrics->total_threats << std::setw(9)
                << r.metrics->threats_neutralized << std::setw(9) << r.metrics->leakers << std::setw(8)
                << r.metrics->ammo_spent << r.metrics->surviving_da_value << "\n";
    }
    print_metrics_table(std::cout, "total over " + std::to_string(rows.size() - failures) + " scenarios",
                        total);
  }
  std::cout << json({{"runs", out}, {"total", total.to_json()}}).dump() << "\n";
  return failures == 0 ? 0 : 1;
}

void print_schedule(const std::string& label, const tewa::WsSchedule& schedule,
                    const std::vector<std::string>& unassigned, double value) {
  std::cout << label << ": value " << std::fixed << std::setprecision(4) << value << ", "
            << schedule.entries().size() << " scheduled";
  if (!unassigned.empty()) {
    std::cout << ", unassigned:";
    for (const auto& t : unassigned) std::cout << " " << t;
  }
  std::cout << "\n";
  for (const auto& e : schedule.sorted()) {
    std::cout << "    " << e.track_id << " -> " << e.ws_id
              << (e.slot == tewa::SlotKind::Locked ? " (locked)" : " (queued)") << "\n";
  }
  std::cout.unsetf(std::ios::fixed);
}

std::vector<std::string> missing(const tewa::AssignmentProblem& problem, const tewa::WsSchedule& s) {
  std::vector<std::string> out;
  for (const auto& t : problem.track_ids) {
    if (s.entry_for(t) == nullptr) out.push_back(t);
  }
  return out;
}

int cmd_compare(const std::string& path) {
  const auto spec = tewa::load_scenario_file(path);
  auto state = tewa::initial_state(spec);
  // Advance until every spawned track has a velocity estimate.
  auto ready = [&] {
    bool any = false;
    for (const auto& t : state.tracks) {
      if (t.status != tewa::TrackStatus::Alive) continue;
      if (t.samples.size() < 2) return false;
      any = true;
    }
    return any;
  };
  while (!ready() && !tewa::finished(state)) tewa::step(state);

  std::vector<tewa::TrackState> alive;
  for (const auto& t : state.tracks) {
    if (t.status == tewa::TrackStatus::Alive) alive.push_back(t);
  }
  auto weapons = spec.weapons;
  const auto weights = tewa::apply_mode(state.mode, spec.weights);
  const auto problem =
      tewa::build_assignment_problem(alive, spec.das, weapons, spec.libraries, weights, state.clock);

  std::cout << "snapshot at t=" << state.clock << " s: " << alive.size() << " threats, "
            << weapons.size() << " weapons, mode " << tewa::to_string(state.mode) << "\n";

  const auto two = tewa::two_stage_assign(alive, spec.das, weapons, spec.libraries, weights, state.clock);
  const double two_value = tewa::schedule_value(problem, two.schedule);
  print_schedule("two-stage", two.schedule, missing(problem, two.schedule), two_value);

  const auto greedy = tewa::greedy_assign(alive, spec.das, weapons, spec.libraries, weights, state.clock);
  const double greedy_value = tewa::schedule_value(problem, greedy.schedule);
  print_schedule("greedy", greedy.schedule, missing(problem, greedy.schedule), greedy_value);

  json doc = {{"time", state.clock},
              {"two_stage", {{"value", two_value}, {"unassigned", missing(problem, two.schedule)}}},
              {"greedy", {{"value", greedy_value}, {"unassigned", missing(problem, greedy.schedule)}}}};
  if (problem.track_ids.size() <= tewa::kOracleMaxThreats &&
      problem.ws_ids.size() <= tewa::kOracleMaxWeapons) {
    const auto oracle = tewa::exhaustive_oracle(problem);
    print_schedule("oracle", oracle.schedule, missing(problem, oracle.schedule), oracle.value);
    doc["oracle"] = {{"value", oracle.value}, {"nodes", oracle.nodes}};
  } else {
    std::cout << "oracle: skipped (instance larger than 8x8)\n";
  }
  std::cout << doc.dump() << "\n";
  return 0;
}

int cmd_serve(const std::string& endpoint, const std::string& deployment,
              std::optional<std::uint64_t> seed, const std::string& trace_out) {
  const auto spec = tewa::load_scenario_file(deployment);
  tewa::ProtocolSession session(spec, seed);
  tewa::ProtocolServer server(endpoint);
  std::cout << "listening on port " << server.port() << std::endl;
  server.serve_one(session);
  if (!trace_out.empty()) write_file(trace_out, tewa::write_trace(session.trace()));
  std::cout << "session closed after " << session.state().tick << " ticks\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Threat evaluation and weapon assignment toolkit"};
  app.require_subcommand(1);

  std::string scenario, dir, endpoint, deployment, trace_out, metrics_out;
  std::optional<std::uint64_t> seed;
  bool summary = false;

  auto* run = app.add_subcommand("run", "Run a scenario and report metrics");
  run->add_option("scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--trace", trace_out, "Write the event trace here");
  run->add_option("--metrics", metrics_out, "Write metrics JSON here");

  auto* batch = app.add_subcommand("batch", "Run every scenario in a directory");
  batch->add_option("dir", dir, "Directory of scenario files")->required()->check(CLI::ExistingDirectory);
  batch->add_flag("--summary", summary, "Print one line per scenario plus totals");
  batch->add_option("--seed", seed, "Override every scenario seed");

  auto* compare = app.add_subcommand("compare", "Two-stage vs greedy vs exhaustive on one snapshot");
  compare->add_option("scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);

  auto* serve = app.add_subcommand("serve", "Serve the simulator protocol for one connection");
  serve->add_option("--listen", endpoint, "host:port to listen on")->required();
  serve->add_option("deployment", deployment, "Deployment file")->required()->check(CLI::ExistingFile);
  serve->add_option("--seed", seed, "Override the deployment seed");
  serve->add_option("--trace", trace_out, "Write the session trace here");

  auto* validate = app.add_subcommand("validate", "Parse and validate a scenario");
  validate->add_option("scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(scenario, seed, trace_out, metrics_out);
    if (*batch) return cmd_batch(dir, summary, seed);
    if (*compare) return cmd_compare(scenario);
    if (*serve) return cmd_serve(endpoint, deployment, seed, trace_out);
    if (*validate) return cmd_validate(scenario);
  } catch (const tewa::ParseError& e) {
    std::cerr << "parse error";
    if (!e.field().empty()) std::cerr << " in " << e.field();
    std::cerr << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
