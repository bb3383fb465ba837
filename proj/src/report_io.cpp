#include "invarlab/report_io.hpp"

#include <cmath>
#include <sstream>

#include "invarlab/scenario_format.hpp"

namespace invarlab {

JsonValue::JsonValue(double value) : node_(value) {
  if (!std::isfinite(value)) {
    throw NumericalError("refusing to serialize a non-finite value");
  }
}

JsonValue JsonValue::object() {
  JsonValue v;
  v.node_ = std::make_shared<Object>();
  return v;
}

JsonValue JsonValue::array() {
  JsonValue v;
  v.node_ = std::make_shared<Array>();
  return v;
}

JsonValue& JsonValue::set(std::string key, JsonValue value) {
  auto* object = std::get_if<std::shared_ptr<Object>>(&node_);
  if (object == nullptr) throw UsageError("set() on a non-object JSON value");
  (*object)->members.emplace_back(std::move(key), std::move(value));
  return *this;
}

JsonValue& JsonValue::push(JsonValue value) {
  auto* array = std::get_if<std::shared_ptr<Array>>(&node_);
  if (array == nullptr) throw UsageError("push() on a non-array JSON value");
  (*array)->items.push_back(std::move(value));
  return *this;
}

namespace {

void write_escaped(std::string& out, const std::string& text) {
  out += '"';
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buffer[8];
          std::snprintf(buffer, sizeof(buffer), "\\u%04x", c);
          out += buffer;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void write_indent(std::string& out, int indent, int depth) {
  if (indent <= 0) return;
  out += '\n';
  out.append(static_cast<std::size_t>(indent * depth), ' ');
}

}  // namespace

void JsonValue::write(std::string& out, int indent, int depth) const {
  if (std::holds_alternative<std::nullptr_t>(node_)) {
    out += "null";
  } else if (const auto* flag = std::get_if<bool>(&node_)) {
    out += *flag ? "true" : "false";
  } else if (const auto* integer = std::get_if<std::int64_t>(&node_)) {
    out += std::to_string(*integer);
  } else if (const auto* real = std::get_if<double>(&node_)) {
    out += format_real(*real);
  } else if (const auto* text = std::get_if<std::string>(&node_)) {
    write_escaped(out, *text);
  } else if (const auto* object = std::get_if<std::shared_ptr<Object>>(&node_)) {
    if ((*object)->members.empty()) {
      out += "{}";
      return;
    }
    out += '{';
    bool first = true;
    for (const auto& [key, value] : (*object)->members) {
      if (!first) out += ',';
      first = false;
      write_indent(out, indent, depth + 1);
      write_escaped(out, key);
      out += indent > 0 ? ": " : ":";
      value.write(out, indent, depth + 1);
    }
    write_indent(out, indent, depth);
    out += '}';
  } else {
    const auto& array = std::get<std::shared_ptr<Array>>(node_);
    if (array->items.empty()) {
      out += "[]";
      return;
    }
    out += '[';
    bool first = true;
    for (const auto& value : array->items) {
      if (!first) out += ',';
      first = false;
      write_indent(out, indent, depth + 1);
      value.write(out, indent, depth + 1);
    }
    write_indent(out, indent, depth);
    out += ']';
  }
}

std::string JsonValue::dump(int indent) const {
  std::string out;
  write(out, indent, 0);
  out += '\n';
  return out;
}

namespace {

JsonValue site_table(const std::vector<std::pair<int, double>>& table,
                     const Alphabet& sites) {
  JsonValue object = JsonValue::object();
  for (const auto& [site, bits] : table) {
    object.set(sites.labels[static_cast<std::size_t>(site)], bits);
  }
  return object;
}

JsonValue site_name_list(const std::vector<int>& site_indices, const Alphabet& sites) {
  JsonValue list = JsonValue::array();
  for (int site : site_indices) {
    list.push(sites.labels[static_cast<std::size_t>(site)]);
  }
  return list;
}

}  // namespace

JsonValue to_json(const InformationReport& report, const Alphabet& sites,
                  const Alphabet& labels) {
  JsonValue value = JsonValue::object();
  value.set("i_y_z_bits", report.i_y_z);
  value.set("i_z_s_bits", report.i_z_s);
  value.set("i_s_y_bits", report.i_s_y);
  value.set("i_y_yhat_bits", report.i_y_yhat);
  value.set("i_yhat_s_bits", report.i_yhat_s);
  value.set("risk", report.risk);
  value.set("per_site_i_y_z_bits", site_table(report.per_site_i_y_z, sites));
  value.set("per_site_i_y_x_bits", site_table(report.per_site_i_y_x, sites));
  JsonValue rates = JsonValue::object();
  for (const auto& [site, row] : report.prediction_rates) {
    JsonValue by_label = JsonValue::object();
    for (std::size_t v = 0; v < row.size(); ++v) {
      by_label.set(labels.labels[v], row[v]);
    }
    rates.set(sites.labels[static_cast<std::size_t>(site)], std::move(by_label));
  }
  value.set("prediction_rates", std::move(rates));
  value.set("skipped_sites", site_name_list(report.skipped_sites, sites));
  JsonValue decision = JsonValue::array();
  for (int y : report.predictor.decision) {
    decision.push(labels.labels[static_cast<std::size_t>(y)]);
  }
  value.set("predictor_decision", std::move(decision));
  return value;
}

JsonValue to_json(const SiteInformationProfile& profile, const Alphabet& sites) {
  JsonValue value = JsonValue::object();
  value.set("per_site_i_y_x_bits", site_table(profile.per_site, sites));
  value.set("minimum_site", sites.labels[static_cast<std::size_t>(profile.minimum_site)]);
  value.set("minimum_value_bits", profile.minimum_value);
  value.set("unconditional_i_y_x_bits", profile.unconditional);
  value.set("skipped_sites", site_name_list(profile.skipped_sites, sites));
  return value;
}

JsonValue to_json(const Prop1Report& report, const Alphabet& sites) {
  JsonValue value = JsonValue::object();
  value.set("lhs_i_y_z_bits", report.lhs);
  value.set("rhs_min_site_i_y_x_bits", report.rhs);
  value.set("rhs_site", sites.labels[static_cast<std::size_t>(report.rhs_site)]);
  value.set("slack_bits", report.slack);
  value.set("hypothesis_i_s_y_bits", report.hypothesis_i_s_y);
  value.set("hypothesis_i_z_s_bits", report.hypothesis_i_z_s);
  value.set("hypothesis_satisfied", report.hypothesis_satisfied);
  value.set("identity_deviation_bits", report.identity_deviation);
  value.set("per_site_i_y_z_bits", site_table(report.per_site_i_y_z, sites));
  value.set("verdict", to_string(report.verdict));
  return value;
}

JsonValue to_json(const Prop2Report& report, const Alphabet& sites, const Alphabet& labels) {
  JsonValue value = JsonValue::object();
  value.set("exclusive_label", labels.labels[static_cast<std::size_t>(report.exclusive_label)]);
  value.set("home_site", sites.labels[static_cast<std::size_t>(report.home_site)]);
  value.set("recall_at_home", report.recall_at_home);
  value.set("false_positive_rate_elsewhere", report.false_positive_rate_elsewhere);
  value.set("rate_gap", report.rate_gap);
  value.set("i_z_s_bits", report.i_z_s);
  JsonValue rates = JsonValue::object();
  for (const auto& [site, rate] : report.rate_by_site) {
    rates.set(sites.labels[static_cast<std::size_t>(site)], rate);
  }
  value.set("rate_by_site", std::move(rates));
  return value;
}

JsonValue to_json(const TradeoffPoint& point, const Alphabet& sites, const Alphabet& labels) {
  JsonValue value = JsonValue::object();
  value.set("lambda", point.lambda);
  value.set("objective_value", point.objective_value);
  value.set("converged", point.converged);
  value.set("restarts_used", point.restarts_used);
  value.set("report", to_json(point.report, sites, labels));
  return value;
}

JsonValue to_json(const Frontier& frontier, const Alphabet& sites, const Alphabet& labels) {
  JsonValue value = JsonValue::object();
  JsonValue points = JsonValue::array();
  for (const auto& point : frontier.points) {
    points.push(to_json(point, sites, labels));
  }
  value.set("points", std::move(points));
  JsonValue pareto = JsonValue::array();
  for (std::size_t index : frontier.pareto) {
    pareto.push(static_cast<std::int64_t>(index));
  }
  value.set("pareto_indices", std::move(pareto));
  return value;
}

JsonValue to_json(const SearchCatalog& catalog) {
  JsonValue value = JsonValue::object();
  JsonValue config = JsonValue::object();
  config.set("instances", catalog.config.instances);
  config.set("seed", static_cast<std::int64_t>(catalog.config.seed));
  JsonValue sizes = JsonValue::object();
  sizes.set("labels", catalog.config.sizes.labels);
  sizes.set("sites", catalog.config.sizes.sites);
  sizes.set("observations", catalog.config.sizes.observations);
  config.set("sizes", std::move(sizes));
  config.set("z_size", catalog.config.z_size);
  config.set("invariance_tolerance_bits", catalog.config.invariance_tolerance);
  config.set("slack_margin_bits", catalog.config.slack_margin);
  config.set("scanner_family", to_string(catalog.config.scanner_family));
  config.set("concentration", catalog.config.concentration);
  value.set("config", std::move(config));
  value.set("instances_run", catalog.instances_run);
  value.set("violations", static_cast<std::int64_t>(catalog.entries.size()));

  JsonValue entries = JsonValue::array();
  for (const auto& entry : catalog.entries) {
    JsonValue item = JsonValue::object();
    item.set("instance", entry.instance);
    item.set("report", to_json(entry.report, entry.scenario.site_alphabet));
    JsonValue map = JsonValue::array();
    for (int z : entry.encoder_map) map.push(z);
    item.set("encoder_map", std::move(map));
    item.set("scenario", serialize_scenario(entry.scenario));
    entries.push(std::move(item));
  }
  value.set("entries", std::move(entries));
  return value;
}

namespace {

void append_frontier_rows(std::string& out, const Frontier& frontier,
                          std::span<const std::size_t> indices) {
  for (std::size_t index : indices) {
    const TradeoffPoint& point = frontier.points[index];
    out += format_real(point.lambda);
    out += ',';
    out += format_real(point.report.i_y_z);
    out += ',';
    out += format_real(point.report.i_z_s);
    out += ',';
    out += format_real(point.report.risk);
    out += ',';
    out += point.converged ? '1' : '0';
    out += ',';
    out += std::to_string(point.restarts_used);
    out += '\n';
  }
}

}  // namespace

std::string frontier_csv(const Frontier& frontier) {
  std::string out = "lambda,i_y_z_bits,i_z_s_bits,risk,converged,restarts_used\n";
  std::vector<std::size_t> all(frontier.points.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  append_frontier_rows(out, frontier, all);
  return out;
}

std::string pareto_csv(const Frontier& frontier) {
  std::string out = "lambda,i_y_z_bits,i_z_s_bits,risk,converged,restarts_used\n";
  append_frontier_rows(out, frontier, frontier.pareto);
  return out;
}

std::string search_summary_csv(const SearchCatalog& catalog) {
  std::string out =
      "instance,verdict,lhs_i_y_z_bits,rhs_min_site_i_y_x_bits,slack_bits,"
      "hypothesis_i_s_y_bits,hypothesis_i_z_s_bits,identity_deviation_bits\n";
  for (const auto& entry : catalog.entries) {
    out += std::to_string(entry.instance);
    out += ',';
    out += to_string(entry.report.verdict);
    out += ',';
    out += format_real(entry.report.lhs);
    out += ',';
    out += format_real(entry.report.rhs);
    out += ',';
    out += format_real(entry.report.slack);
    out += ',';
    out += format_real(entry.report.hypothesis_i_s_y);
    out += ',';
    out += format_real(entry.report.hypothesis_i_z_s);
    out += ',';
    out += format_real(entry.report.identity_deviation);
    out += '\n';
  }
  return out;
}

}  // namespace invarlab
