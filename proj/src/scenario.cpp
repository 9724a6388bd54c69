#include "tewa/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "tewa/errors.hpp"
#include "tewa/trace.hpp"

namespace tewa {

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ParseError(field + ": " + what, 0, field);
}

const json& require(const json& obj, const std::string& key, const std::string& ctx) {
  if (!obj.is_object()) field_error(ctx, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) field_error(ctx + "." + key, "missing field");
  return *it;
}

double num(const json& obj, const std::string& key, const std::string& ctx) {
  const auto& v = require(obj, key, ctx);
  if (!v.is_number()) field_error(ctx + "." + key, "expected a number");
  return v.get<double>();
}

double num_or(const json& obj, const std::string& key, double fallback, const std::string& ctx) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_number()) field_error(ctx + "." + key, "expected a number");
  return it->get<double>();
}

std::string str(const json& obj, const std::string& key, const std::string& ctx) {
  const auto& v = require(obj, key, ctx);
  if (!v.is_string()) field_error(ctx + "." + key, "expected a string");
  return v.get<std::string>();
}

std::string str_or(const json& obj, const std::string& key, const std::string& fallback,
                   const std::string& ctx) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_string()) field_error(ctx + "." + key, "expected a string");
  return it->get<std::string>();
}

Point2 point(const json& v, const std::string& ctx) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    field_error(ctx, "expected [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

const json& array(const json& obj, const std::string& key, const std::string& ctx) {
  static const json kEmpty = json::array();
  const auto it = obj.find(key);
  if (it == obj.end()) return kEmpty;
  if (!it->is_array()) field_error(ctx + key, "expected an array");
  return *it;
}

void unit(double v, const std::string& what) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(what + " must lie in [0, 1]");
}

void positive(double v, const std::string& what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(what + " must be positive");
}

json to_json(Point2 p) { return json::array({p.x, p.y}); }

}  // namespace

std::optional<Point2> ThreatPlan::position_at(double t) const {
  if (waypoints.empty()) return std::nullopt;
  double remaining = std::max(t - spawn_time, 0.0);
  if (waypoints.size() == 1) return waypoints.front();
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const Vec2 leg = waypoints[i + 1] - waypoints[i];
    const double length = leg.norm();
    const double duration = length / leg_speeds[i];
    if (remaining <= duration) {
      if (length == 0.0) return waypoints[i];
      return waypoints[i] + leg * (remaining / duration);
    }
    remaining -= duration;
  }
  return std::nullopt;
}

WeightsConfig weights_from_json(const json& doc) {
  WeightsConfig w;
  if (doc.is_null()) return w;
  const std::string ctx = "weights";
  if (!doc.is_object()) field_error(ctx, "expected an object");
  if (doc.contains("eq3")) {
    const auto& g = doc["eq3"];
    w.eq3 = {num(g, "intent", ctx + ".eq3"), num(g, "capability", ctx + ".eq3"),
             num(g, "load", ctx + ".eq3")};
  }
  if (doc.contains("intent")) {
    const auto& g = doc["intent"];
    w.intent = {num(g, "heading", ctx + ".intent"), num(g, "closing_speed", ctx + ".intent"),
                num(g, "time", ctx + ".intent")};
  }
  if (doc.contains("da_pair")) {
    const auto& g = doc["da_pair"];
    w.da_pair = {num(g, "kill_capability", ctx + ".da_pair"), num(g, "time", ctx + ".da_pair"),
                 num(g, "load", ctx + ".da_pair")};
  }
  if (doc.contains("ws_pair")) {
    const auto& g = doc["ws_pair"];
    const auto c = ctx + ".ws_pair";
    w.ws_pair = {num(g, "time", c), num(g, "elevation", c), num(g, "lethality", c),
                 num(g, "stabilization", c), num(g, "rate_of_fire", c)};
  }
  w.capability_threshold = num_or(doc, "capability_threshold", w.capability_threshold, ctx);
  w.reference_speed = num_or(doc, "reference_speed", w.reference_speed, ctx);
  w.time_to_da_scale = num_or(doc, "time_to_da_scale", w.time_to_da_scale, ctx);
  w.time_to_ws_scale = num_or(doc, "time_to_ws_scale", w.time_to_ws_scale, ctx);
  w.stabilization_scale = num_or(doc, "stabilization_scale", w.stabilization_scale, ctx);
  w.reference_rate_of_fire = num_or(doc, "reference_rate_of_fire", w.reference_rate_of_fire, ctx);
  w.shots_per_engagement =
      static_cast<int>(num_or(doc, "shots_per_engagement", w.shots_per_engagement, ctx));
  if (const auto m = str_or(doc, "mode_override", "", ctx); !m.empty()) {
    w.mode_override = parse_defense_mode(m);
  }
  return w;
}

json weights_to_json(const WeightsConfig& w) {
  json doc = {
      {"eq3", {{"intent", w.eq3.intent}, {"capability", w.eq3.capability}, {"load", w.eq3.load}}},
      {"intent",
       {{"heading", w.intent.heading},
        {"closing_speed", w.intent.closing_speed},
        {"time", w.intent.time}}},
      {"da_pair",
       {{"kill_capability", w.da_pair.kill_capability},
        {"time", w.da_pair.time},
        {"load", w.da_pair.load}}},
      {"ws_pair",
       {{"time", w.ws_pair.time},
        {"elevation", w.ws_pair.elevation},
        {"lethality", w.ws_pair.lethality},
        {"stabilization", w.ws_pair.stabilization},
        {"rate_of_fire", w.ws_pair.rate_of_fire}}},
      {"capability_threshold", w.capability_threshold},
      {"reference_speed", w.reference_speed},
      {"time_to_da_scale", w.time_to_da_scale},
      {"time_to_ws_scale", w.time_to_ws_scale},
      {"stabilization_scale", w.stabilization_scale},
      {"reference_rate_of_fire", w.reference_rate_of_fire},
      {"shots_per_engagement", w.shots_per_engagement},
  };
  doc["mode_override"] = w.mode_override ? json(std::string(to_string(*w.mode_override))) : json();
  return doc;
}

void ScenarioSpec::validate() const {
  weights.validate();
  positive(dt, "dt");
  positive(max_time, "max_time");

  std::set<std::string> da_ids;
  for (const auto& da : das) {
    if (da.da_id.empty()) throw ValidationError("DA id must not be empty");
    if (!da_ids.insert(da.da_id).second) throw ValidationError("duplicate DA id '" + da.da_id + "'");
    positive(da.footprint.radius, "DA '" + da.da_id + "' radius");
    unit(da.priority, "DA '" + da.da_id + "' priority");
    unit(da.vulnerability, "DA '" + da.da_id + "' vulnerability");
    if (da.quota < 1) throw ValidationError("DA '" + da.da_id + "' quota must be >= 1");
  }

  std::set<std::string> ws_ids;
  for (const auto& ws : weapons) {
    const auto ctx = "weapon '" + ws.ws_id + "'";
    if (ws.ws_id.empty()) throw ValidationError("weapon id must not be empty");
    if (!ws_ids.insert(ws.ws_id).second) throw ValidationError("duplicate " + ctx);
    if (!da_ids.contains(ws.da_id)) {
      throw ValidationError(ctx + " references unknown DA '" + ws.da_id + "'");
    }
    if (!std::any_of(libraries.weapon_classes().begin(), libraries.weapon_classes().end(),
                     [&](const WeaponClassRecord& r) { return r.class_id == ws.weapon_class; })) {
      throw ValidationError(ctx + " has unknown weapon class '" + ws.weapon_class + "'");
    }
    positive(ws.range, ctx + " range");
    if (!(ws.sweep_angle > 0.0 && ws.sweep_angle <= geometry::kTwoPi + 1e-12)) {
      throw ValidationError(ctx + " sweep_angle must lie in (0, 2*pi]");
    }
    positive(ws.max_elevation, ctx + " max_elevation");
    positive(ws.projectile_speed, ctx + " projectile_speed");
    positive(ws.rate_of_fire, ctx + " rate_of_fire");
    if (!(ws.stabilization_time >= 0.0)) throw ValidationError(ctx + " stabilization_time < 0");
    unit(ws.lethality_index, ctx + " lethality_index");
    if (ws.ammo < 0) throw ValidationError(ctx + " ammo must be >= 0");
  }

  std::set<std::string> threat_ids;
  for (const auto& t : threats) {
    const auto ctx = "threat '" + t.track_id + "'";
    if (t.track_id.empty()) throw ValidationError("threat id must not be empty");
    if (!threat_ids.insert(t.track_id).second) throw ValidationError("duplicate " + ctx);
    if (t.waypoints.empty()) throw ValidationError(ctx + " needs at least one waypoint");
    if (t.leg_speeds.size() + 1 != t.waypoints.size()) {
      throw ValidationError(ctx + " needs one speed per leg");
    }
    for (double s : t.leg_speeds) positive(s, ctx + " leg speed");
    if (!(t.spawn_time >= 0.0)) throw ValidationError(ctx + " spawn_time must be >= 0");
    if (!(t.altitude >= 0.0)) throw ValidationError(ctx + " altitude must be >= 0");
    unit(t.value, ctx + " value");
  }
}

ScenarioSpec parse_scenario(std::string_view document, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    const std::size_t line =
        1 + std::count(document.begin(), document.begin() + std::min(e.byte, document.size()), '\n');
    throw ParseError("scenario line " + std::to_string(line) + ": " + e.what(), line, "");
  }
  if (!doc.is_object()) field_error("<root>", "expected an object");

  const int version = static_cast<int>(num_or(doc, "version", kFormatVersion, ""));
  if (version != kFormatVersion) {
    throw VersionMismatch("scenario version " + std::to_string(version) + " is not supported");
  }

  ScenarioSpec spec;
  spec.name = str_or(doc, "name", "", "");

  try {
    if (const auto it = doc.find("libraries"); it != doc.end()) {
      if (it->is_string()) {
        const auto path = base_dir / it->get<std::string>();
        json lib;
        try {
          lib = json::parse(read_text_file(path));
        } catch (const json::parse_error& e) {
          throw ParseError(path.string() + ": " + e.what(), 0, "libraries");
        }
        spec.libraries = libraries_from_json(lib);
      } else {
        spec.libraries = libraries_from_json(*it);
      }
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(std::string("libraries: ") + e.what());
  }

  const auto& das = array(doc, "das", "");
  for (std::size_t i = 0; i < das.size(); ++i) {
    const auto ctx = "das[" + std::to_string(i) + "]";
    const auto& j = das[i];
    DefendedAsset da;
    da.da_id = str(j, "id", ctx);
    da.footprint = {point(require(j, "center", ctx), ctx + ".center"), num(j, "radius", ctx)};
    da.priority = num_or(j, "priority", 0.5, ctx);
    da.vulnerability = num_or(j, "vulnerability", 0.5, ctx);
    da.status = parse_asset_status(str_or(j, "status", "free_to_fire", ctx));
    da.quota = static_cast<int>(num_or(j, "quota", 0, ctx));
    spec.das.push_back(std::move(da));
  }

  const auto& weapons = array(doc, "weapons", "");
  for (std::size_t i = 0; i < weapons.size(); ++i) {
    const auto ctx = "weapons[" + std::to_string(i) + "]";
    const auto& j = weapons[i];
    WeaponSystem ws;
    ws.ws_id = str(j, "id", ctx);
    ws.da_id = str(j, "da", ctx);
    ws.weapon_class = str(j, "class", ctx);
    ws.position = point(require(j, "position", ctx), ctx + ".position");
    ws.range = num(j, "range", ctx);
    ws.start_angle = geometry::normalize_angle(num_or(j, "start_angle", 0.0, ctx));
    ws.sweep_angle = num_or(j, "sweep_angle", geometry::kTwoPi, ctx);
    ws.max_elevation = num_or(j, "max_elevation", 1.4, ctx);
    ws.projectile_speed = num(j, "projectile_speed", ctx);
    ws.rate_of_fire = num_or(j, "rate_of_fire", 1.0, ctx);
    ws.stabilization_time = num_or(j, "stabilization_time", 0.0, ctx);
    double lethality = -1.0;
    for (const auto& r : spec.libraries.weapon_classes()) {
      if (r.class_id == ws.weapon_class) lethality = r.lethality_index;
    }
    ws.lethality_index = num_or(j, "lethality_index", lethality, ctx);
    ws.condition = parse_weapon_condition(str_or(j, "condition", "up", ctx));
    ws.ammo = static_cast<int>(num(j, "ammo", ctx));
    spec.weapons.push_back(std::move(ws));
  }
  for (auto& da : spec.das) {
    for (const auto& ws : spec.weapons) {
      if (ws.da_id == da.da_id) da.weapon_ids.push_back(ws.ws_id);
    }
    if (da.quota == 0) da.quota = default_quota(da.weapon_ids.size());
  }

  const auto& threats = array(doc, "threats", "");
  for (std::size_t i = 0; i < threats.size(); ++i) {
    const auto ctx = "threats[" + std::to_string(i) + "]";
    const auto& j = threats[i];
    ThreatPlan t;
    t.track_id = str(j, "id", ctx);
    t.threat_class = str(j, "class", ctx);
    const auto& wps = require(j, "waypoints", ctx);
    if (!wps.is_array()) field_error(ctx + ".waypoints", "expected an array");
    for (std::size_t k = 0; k < wps.size(); ++k) {
      t.waypoints.push_back(point(wps[k], ctx + ".waypoints[" + std::to_string(k) + "]"));
    }
    const auto& speeds = array(j, "speeds", ctx + ".");
    for (const auto& s : speeds) {
      if (!s.is_number()) field_error(ctx + ".speeds", "expected numbers");
      t.leg_speeds.push_back(s.get<double>());
    }
    t.spawn_time = num_or(j, "spawn_time", 0.0, ctx);
    t.altitude = num_or(j, "altitude", 0.0, ctx);
    t.value = num_or(j, "value", spec.libraries.threat(t.threat_class).value, ctx);
    spec.threats.push_back(std::move(t));
  }

  spec.weights = weights_from_json(doc.value("weights", json()));
  spec.dt = num_or(doc, "dt", spec.dt, "");
  spec.max_time = num_or(doc, "max_time", spec.max_time, "");
  if (const auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
      field_error("seed", "expected a non-negative integer");
    }
    spec.seed = it->get<std::uint64_t>();
  }
  spec.initial_mode = parse_defense_mode(str_or(doc, "initial_mode", "subtractive", ""));

  spec.validate();
  return spec;
}

ScenarioSpec load_scenario_file(const std::filesystem::path& path) {
  return parse_scenario(read_text_file(path), path.parent_path());
}

json scenario_to_json(const ScenarioSpec& spec) {
  json das = json::array();
  for (const auto& da : spec.das) {
    das.push_back({{"id", da.da_id},
                   {"center", to_json(da.footprint.center)},
                   {"radius", da.footprint.radius},
                   {"priority", da.priority},
                   {"vulnerability", da.vulnerability},
                   {"status", to_string(da.status)},
                   {"quota", da.quota}});
  }
  json weapons = json::array();
  for (const auto& ws : spec.weapons) {
    weapons.push_back({{"id", ws.ws_id},
                       {"da", ws.da_id},
                       {"class", ws.weapon_class},
                       {"position", to_json(ws.position)},
                       {"range", ws.range},
                       {"start_angle", ws.start_angle},
                       {"sweep_angle", ws.sweep_angle},
                       {"max_elevation", ws.max_elevation},
                       {"projectile_speed", ws.projectile_speed},
                       {"rate_of_fire", ws.rate_of_fire},
                       {"stabilization_time", ws.stabilization_time},
                       {"lethality_index", ws.lethality_index},
                       {"condition", to_string(ws.condition)},
                       {"ammo", ws.ammo}});
  }
  json threats = json::array();
  for (const auto& t : spec.threats) {
    json wps = json::array();
    for (const auto& p : t.waypoints) wps.push_back(to_json(p));
    threats.push_back({{"id", t.track_id},
                       {"class", t.threat_class},
                       {"waypoints", wps},
                       {"speeds", t.leg_speeds},
                       {"spawn_time", t.spawn_time},
                       {"altitude", t.altitude},
                       {"value", t.value}});
  }
  return {{"version", kFormatVersion},
          {"name", spec.name},
          {"libraries", libraries_to_json(spec.libraries)},
          {"das", das},
          {"weapons", weapons},
          {"threats", threats},
          {"weights", weights_to_json(spec.weights)},
          {"dt", spec.dt},
          {"max_time", spec.max_time},
          {"seed", spec.seed},
          {"initial_mode", to_string(spec.initial_mode)}};
}

std::string serialize_scenario(const ScenarioSpec& spec) { return scenario_to_json(spec).dump(2); }

std::string scenario_hash(const ScenarioSpec& spec) { return fnv1a_hex(scenario_to_json(spec).dump()); }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace tewa
