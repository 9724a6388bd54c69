#pragma once

// Threat and weapon class libraries and the weapon-vs-threat effectiveness
// table that ties them together.

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace tewa {

inline constexpr std::string_view kUnknownThreatClass = "unknown";

struct ThreatClassRecord {
  std::string class_id;
  std::string name;
  double base_capability = 1.0;
  double base_speed = 0.3;  // km/s
  double value = 1.0;
};

struct WeaponClassRecord {
  std::string class_id;
  std::string name;
  double lethality_index = 0.0;
  double priority = 0.0;
};

class CorrelationTable {
 public:
  void set(const std::string& weapon_class, const std::string& threat_class, double c);
  void set_unknown(const std::string& weapon_class, double c);

  // Stored value, or the weapon's unknown-threat value when the threat class
  // has no explicit entry. Throws UnknownWeaponClass if neither resolves.
  double effectiveness(const std::string& weapon_class, const std::string& threat_class) const;

  bool has_weapon(const std::string& weapon_class) const;
  bool resolves(const std::string& weapon_class, const std::string& threat_class) const;
  std::size_t size() const { return table_.size() + unknown_.size(); }

  const std::map<std::pair<std::string, std::string>, double>& entries() const { return table_; }
  const std::map<std::string, double>& unknown_row() const { return unknown_; }

 private:
  std::map<std::pair<std::string, std::string>, double> table_;
  std::map<std::string, double> unknown_;
};

class Libraries {
 public:
  Libraries();
  Libraries(std::vector<ThreatClassRecord> threats, std::vector<WeaponClassRecord> weapons,
            CorrelationTable correlation, ThreatClassRecord unknown_threat);

  const std::vector<ThreatClassRecord>& threat_classes() const { return threats_; }
  const std::vector<WeaponClassRecord>& weapon_classes() const { return weapons_; }
  const CorrelationTable& correlation() const { return correlation_; }

  // Record for a class id; unrecognised ids get the conservative unknown record.
  const ThreatClassRecord& threat(const std::string& class_id) const;
  bool knows_threat(const std::string& class_id) const;
  const ThreatClassRecord& unknown_threat() const { return unknown_threat_; }

  // Throws UnknownWeaponClass.
  const WeaponClassRecord& weapon(const std::string& class_id) const;

  double effectiveness(const std::string& weapon_class, const std::string& threat_class) const;

  // All weapon classes, most effective first; ties by higher priority, then id.
  std::vector<std::string> preferred_weapons(const std::string& threat_class) const;

 private:
  std::vector<ThreatClassRecord> threats_;
  std::vector<WeaponClassRecord> weapons_;
  CorrelationTable correlation_;
  ThreatClassRecord unknown_threat_;
};

// Each document is a JSON object holding the named top-level array
// ("threat_classes", "weapon_classes", "correlation"). Throws
// DuplicateClassId, OutOfRangeValue, MissingCorrelation or ParseError.
Libraries load_libraries(std::string_view threat_doc, std::string_view weapon_doc,
                         std::string_view correlation_doc);

// Same validation from one object carrying all three arrays and an optional
// "unknown_threat" record.
Libraries libraries_from_json(const nlohmann::json& doc);
nlohmann::json libraries_to_json(const Libraries& libraries);

}  // namespace tewa
