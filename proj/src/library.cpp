#include "tewa/library.hpp"

#include <algorithm>
#include <set>

#include "tewa/errors.hpp"

namespace tewa {

namespace {

using nlohmann::json;

void require_unit(double v, const std::string& what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw OutOfRangeValue(what + " = " + std::to_string(v) + " is outside [0, 1]");
  }
}

double number_field(const json& obj, const char* key, const std::string& ctx) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw ParseError(ctx + ": missing numeric field '" + key + "'", 0, ctx + "." + key);
  }
  return it->get<double>();
}

double number_field(const json& obj, const char* key, double fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw ParseError(std::string("field '") + key + "' must be a number", 0, key);
  return it->get<double>();
}

std::string string_field(const json& obj, const char* key, const std::string& ctx) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw ParseError(ctx + ": missing string field '" + key + "'", 0, ctx + "." + key);
  }
  return it->get<std::string>();
}

const json& array_field(const json& doc, const char* key) {
  static const json kEmpty = json::array();
  if (!doc.is_object()) throw ParseError("library document must be an object", 0, key);
  const auto it = doc.find(key);
  if (it == doc.end()) return kEmpty;
  if (!it->is_array()) throw ParseError(std::string("'") + key + "' must be an array", 0, key);
  return *it;
}

ThreatClassRecord parse_threat(const json& j, const std::string& ctx) {
  ThreatClassRecord r;
  r.class_id = string_field(j, "id", ctx);
  r.name = j.value("name", r.class_id);
  r.base_capability = number_field(j, "base_capability", ctx);
  r.base_speed = number_field(j, "base_speed", ctx);
  r.value = number_field(j, "value", 1.0);
  return r;
}

json parse_text(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t line =
        1 + std::count(text.begin(), text.begin() + std::min(e.byte, text.size()), '\n');
    throw ParseError(std::string(what) + ": " + e.what(), line, "");
  }
}

void validate_threat(const ThreatClassRecord& r) {
  require_unit(r.base_capability, "threat '" + r.class_id + "' base_capability");
  require_unit(r.value, "threat '" + r.class_id + "' value");
  if (!(r.base_speed > 0.0)) {
    throw OutOfRangeValue("threat '" + r.class_id + "' base_speed must be positive");
  }
}

}  // namespace

void CorrelationTable::set(const std::string& weapon_class, const std::string& threat_class,
                           double c) {
  require_unit(c, "correlation(" + weapon_class + ", " + threat_class + ")");
  table_[{weapon_class, threat_class}] = c;
}

void CorrelationTable::set_unknown(const std::string& weapon_class, double c) {
  require_unit(c, "correlation(" + weapon_class + ", unknown)");
  unknown_[weapon_class] = c;
}

bool CorrelationTable::has_weapon(const std::string& weapon_class) const {
  if (unknown_.contains(weapon_class)) return true;
  const auto it = table_.lower_bound({weapon_class, std::string{}});
  return it != table_.end() && it->first.first == weapon_class;
}

bool CorrelationTable::resolves(const std::string& weapon_class,
                                const std::string& threat_class) const {
  return table_.contains({weapon_class, threat_class}) || unknown_.contains(weapon_class);
}

double CorrelationTable::effectiveness(const std::string& weapon_class,
                                       const std::string& threat_class) const {
  if (const auto it = table_.find({weapon_class, threat_class}); it != table_.end()) {
    return it->second;
  }
  if (const auto it = unknown_.find(weapon_class); it != unknown_.end()) return it->second;
  throw UnknownWeaponClass("no effectiveness entry for weapon class '" + weapon_class + "'");
}

Libraries::Libraries() : unknown_threat_{std::string(kUnknownThreatClass), "unknown", 1.0, 0.3, 1.0} {}

Libraries::Libraries(std::vector<ThreatClassRecord> threats, std::vector<WeaponClassRecord> weapons,
                     CorrelationTable correlation, ThreatClassRecord unknown_threat)
    : threats_(std::move(threats)),
      weapons_(std::move(weapons)),
      correlation_(std::move(correlation)),
      unknown_threat_(std::move(unknown_threat)) {
  std::set<std::string> seen;
  for (const auto& t : threats_) {
    if (t.class_id.empty()) throw ValidationError("threat class id must not be empty");
    if (t.class_id == kUnknownThreatClass) {
      throw DuplicateClassId("threat class id 'unknown' is reserved");
    }
    if (!seen.insert(t.class_id).second) {
      throw DuplicateClassId("duplicate threat class id '" + t.class_id + "'");
    }
    validate_threat(t);
  }
  validate_threat(unknown_threat_);

  seen.clear();
  for (const auto& w : weapons_) {
    if (w.class_id.empty()) throw ValidationError("weapon class id must not be empty");
    if (!seen.insert(w.class_id).second) {
      throw DuplicateClassId("duplicate weapon class id '" + w.class_id + "'");
    }
    require_unit(w.lethality_index, "weapon '" + w.class_id + "' lethality_index");
    require_unit(w.priority, "weapon '" + w.class_id + "' priority");
  }

  for (const auto& [key, c] : correlation_.entries()) {
    if (!seen.contains(key.first)) {
      throw MissingCorrelation("correlation names undeclared weapon class '" + key.first + "'");
    }
    if (!knows_threat(key.second)) {
      throw MissingCorrelation("correlation names undeclared threat class '" + key.second + "'");
    }
  }
  for (const auto& [weapon, c] : correlation_.unknown_row()) {
    if (!seen.contains(weapon)) {
      throw MissingCorrelation("unknown-threat row names undeclared weapon class '" + weapon + "'");
    }
  }
  // Closure: every weapon must answer for every declared threat class and for
  // threats nobody has classified yet.
  for (const auto& w : weapons_) {
    if (!correlation_.unknown_row().contains(w.class_id)) {
      throw MissingCorrelation("weapon class '" + w.class_id + "' has no unknown-threat entry");
    }
    for (const auto& t : threats_) {
      if (!correlation_.resolves(w.class_id, t.class_id)) {
        throw MissingCorrelation("no correlation for (" + w.class_id + ", " + t.class_id + ")");
      }
    }
  }
}

bool Libraries::knows_threat(const std::string& class_id) const {
  return std::any_of(threats_.begin(), threats_.end(),
                     [&](const ThreatClassRecord& r) { return r.class_id == class_id; });
}

const ThreatClassRecord& Libraries::threat(const std::string& class_id) const {
  for (const auto& r : threats_) {
    if (r.class_id == class_id) return r;
  }
  return unknown_threat_;
}

const WeaponClassRecord& Libraries::weapon(const std::string& class_id) const {
  for (const auto& r : weapons_) {
    if (r.class_id == class_id) return r;
  }
  throw UnknownWeaponClass("unknown weapon class '" + class_id + "'");
}

double Libraries::effectiveness(const std::string& weapon_class,
                                const std::string& threat_class) const {
  weapon(weapon_class);
  return correlation_.effectiveness(weapon_class, threat_class);
}

std::vector<std::string> Libraries::preferred_weapons(const std::string& threat_class) const {
  struct Row {
    double effectiveness;
    double priority;
    const std::string* id;
  };
  std::vector<Row> rows;
  rows.reserve(weapons_.size());
  for (const auto& w : weapons_) {
    rows.push_back({correlation_.effectiveness(w.class_id, threat_class), w.priority, &w.class_id});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.effectiveness != b.effectiveness) return a.effectiveness > b.effectiveness;
    if (a.priority != b.priority) return a.priority > b.priority;
    return *a.id < *b.id;
  });
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(*r.id);
  return out;
}

Libraries libraries_from_json(const json& doc) {
  std::vector<ThreatClassRecord> threats;
  const auto& threat_rows = array_field(doc, "threat_classes");
  for (std::size_t i = 0; i < threat_rows.size(); ++i) {
    threats.push_back(parse_threat(threat_rows[i], "threat_classes[" + std::to_string(i) + "]"));
  }

  std::vector<WeaponClassRecord> weapons;
  const auto& weapon_rows = array_field(doc, "weapon_classes");
  for (std::size_t i = 0; i < weapon_rows.size(); ++i) {
    const auto ctx = "weapon_classes[" + std::to_string(i) + "]";
    const auto& j = weapon_rows[i];
    WeaponClassRecord w;
    w.class_id = string_field(j, "id", ctx);
    w.name = j.value("name", w.class_id);
    w.lethality_index = number_field(j, "lethality_index", ctx);
    w.priority = number_field(j, "priority", 0.0);
    weapons.push_back(std::move(w));
  }

  CorrelationTable table;
  const auto& corr_rows = array_field(doc, "correlation");
  for (std::size_t i = 0; i < corr_rows.size(); ++i) {
    const auto ctx = "correlation[" + std::to_string(i) + "]";
    const auto& j = corr_rows[i];
    const auto weapon = string_field(j, "weapon", ctx);
    const auto threat = string_field(j, "threat", ctx);
    const double c = number_field(j, "c", ctx);
    if (threat == kUnknownThreatClass) {
      table.set_unknown(weapon, c);
    } else {
      table.set(weapon, threat, c);
    }
  }

  ThreatClassRecord unknown = Libraries().unknown_threat();
  if (doc.is_object() && doc.contains("unknown_threat")) {
    const auto& u = doc.at("unknown_threat");
    unknown.base_capability = number_field(u, "base_capability", unknown.base_capability);
    unknown.base_speed = number_field(u, "base_speed", unknown.base_speed);
    unknown.value = number_field(u, "value", unknown.value);
  }
  return Libraries(std::move(threats), std::move(weapons), std::move(table), std::move(unknown));
}

Libraries load_libraries(std::string_view threat_doc, std::string_view weapon_doc,
                         std::string_view correlation_doc) {
  const json threats = parse_text(threat_doc, "threat library");
  const json weapons = parse_text(weapon_doc, "weapon library");
  const json correlation = parse_text(correlation_doc, "correlation table");
  json merged = json::object();
  merged["threat_classes"] = array_field(threats, "threat_classes");
  merged["weapon_classes"] = array_field(weapons, "weapon_classes");
  merged["correlation"] = array_field(correlation, "correlation");
  if (threats.contains("unknown_threat")) merged["unknown_threat"] = threats["unknown_threat"];
  return libraries_from_json(merged);
}

json libraries_to_json(const Libraries& libraries) {
  json doc = json::object();
  json threats = json::array();
  for (const auto& t : libraries.threat_classes()) {
    threats.push_back({{"id", t.class_id},
                       {"name", t.name},
                       {"base_capability", t.base_capability},
                       {"base_speed", t.base_speed},
                       {"value", t.value}});
  }
  json weapons = json::array();
  for (const auto& w : libraries.weapon_classes()) {
    weapons.push_back({{"id", w.class_id},
                       {"name", w.name},
                       {"lethality_index", w.lethality_index},
                       {"priority", w.priority}});
  }
  json corr = json::array();
  for (const auto& [key, c] : libraries.correlation().entries()) {
    corr.push_back({{"weapon", key.first}, {"threat", key.second}, {"c", c}});
  }
  for (const auto& [weapon, c] : libraries.correlation().unknown_row()) {
    corr.push_back({{"weapon", weapon}, {"threat", kUnknownThreatClass}, {"c", c}});
  }
  const auto& u = libraries.unknown_threat();
  doc["threat_classes"] = std::move(threats);
  doc["weapon_classes"] = std::move(weapons);
  doc["correlation"] = std::move(corr);
  doc["unknown_threat"] = {
      {"base_capability", u.base_capability}, {"base_speed", u.base_speed}, {"value", u.value}};
  return doc;
}

}  // namespace tewa
