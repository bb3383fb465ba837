#pragma once

#include <initializer_list>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "invarlab/lab.hpp"
#include "invarlab/optimize.hpp"

namespace invarlab {

/// Minimal JSON document with insertion-ordered objects and floats
/// emitted at 17 significant digits, so identical reports serialize to
/// identical bytes and every value re-parses bit-exactly.
class JsonValue {
 public:
  JsonValue() : node_(nullptr) {}
  JsonValue(std::nullptr_t) : node_(nullptr) {}
  JsonValue(bool value) : node_(value) {}
  JsonValue(double value);
  JsonValue(int value) : node_(static_cast<std::int64_t>(value)) {}
  JsonValue(std::int64_t value) : node_(value) {}
  JsonValue(std::uint64_t value) : node_(static_cast<std::int64_t>(value)) {}
  JsonValue(const char* value) : node_(std::string(value)) {}
  JsonValue(std::string value) : node_(std::move(value)) {}

  static JsonValue object();
  static JsonValue array();

  /// Append a key (objects keep insertion order).
  JsonValue& set(std::string key, JsonValue value);
  JsonValue& push(JsonValue value);

  std::string dump(int indent = 2) const;

 private:
  struct Object {
    std::vector<std::pair<std::string, JsonValue>> members;
  };
  struct Array {
    std::vector<JsonValue> items;
  };
  std::variant<std::nullptr_t, bool, std::int64_t, double, std::string,
               std::shared_ptr<Object>, std::shared_ptr<Array>>
      node_;

  void write(std::string& out, int indent, int depth) const;
};

JsonValue to_json(const InformationReport& report, const Alphabet& sites,
                  const Alphabet& labels);
JsonValue to_json(const SiteInformationProfile& profile, const Alphabet& sites);
JsonValue to_json(const Prop1Report& report, const Alphabet& sites);
JsonValue to_json(const Prop2Report& report, const Alphabet& sites, const Alphabet& labels);
JsonValue to_json(const TradeoffPoint& point, const Alphabet& sites, const Alphabet& labels);
JsonValue to_json(const Frontier& frontier, const Alphabet& sites, const Alphabet& labels);
JsonValue to_json(const SearchCatalog& catalog);

/// frontier.csv / pareto.csv rows: one per trade-off point.
std::string frontier_csv(const Frontier& frontier);
std::string pareto_csv(const Frontier& frontier);

/// summary.csv: one row per catalog entry.
std::string search_summary_csv(const SearchCatalog& catalog);

}  // namespace invarlab
