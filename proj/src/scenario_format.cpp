#include "invarlab/scenario_format.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace invarlab {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct Section {
  std::string name;
  int line = 0;
  std::map<std::string, Entry> entries;
  bool used = false;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<Section> tokenize(std::string_view text) {
  std::vector<Section> sections;
  int line_number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                           : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_number;

    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ParseError("unterminated section header", line_number);
      }
      Section section;
      section.name = std::string(trim(line.substr(1, line.size() - 2)));
      section.line = line_number;
      if (section.name.empty()) throw ParseError("empty section name", line_number);
      sections.push_back(std::move(section));
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected 'key = value'", line_number);
    }
    if (sections.empty()) {
      throw ParseError("key outside of any section", line_number);
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError("empty key", line_number);
    auto [it, inserted] = sections.back().entries.emplace(key, Entry{value, line_number});
    if (!inserted) {
      throw ParseError("duplicate key '" + key + "' in section [" + sections.back().name + "]",
                       line_number);
    }
  }
  return sections;
}

double parse_double(const std::string& value, int line) {
  const char* begin = value.c_str();
  char* end = nullptr;
  const double parsed = std::strtod(begin, &end);
  if (end == begin || *trim(std::string_view(end)).data() != '\0' ||
      !std::isfinite(parsed)) {
    throw ParseError("expected a number, got '" + value + "'", line);
  }
  return parsed;
}

int parse_int(const std::string& value, int line) {
  const double parsed = parse_double(value, line);
  const double rounded = std::nearbyint(parsed);
  if (parsed != rounded || std::abs(parsed) > 1e9) {
    throw ParseError("expected an integer, got '" + value + "'", line);
  }
  return static_cast<int>(rounded);
}

std::vector<double> parse_list(const std::string& value, int line) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    std::size_t comma = value.find(',', pos);
    if (comma == std::string::npos) comma = value.size();
    const std::string item(trim(std::string_view(value).substr(pos, comma - pos)));
    if (item.empty()) throw ParseError("empty entry in number list", line);
    out.push_back(parse_double(item, line));
    pos = comma + 1;
    if (comma == value.size()) break;
  }
  if (out.empty()) throw ParseError("empty number list", line);
  return out;
}

std::vector<std::string> parse_names(const std::string& value, int line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    std::size_t comma = value.find(',', pos);
    if (comma == std::string::npos) comma = value.size();
    const std::string item(trim(std::string_view(value).substr(pos, comma - pos)));
    if (item.empty()) throw ParseError("empty name in list", line);
    out.push_back(item);
    pos = comma + 1;
    if (comma == value.size()) break;
  }
  if (out.empty()) throw ParseError("empty name list", line);
  return out;
}

class SectionReader {
 public:
  explicit SectionReader(Section& section) : section_(section) { section_.used = true; }

  const Entry* find(const std::string& key) {
    auto it = section_.entries.find(key);
    if (it == section_.entries.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  const Entry& require(const std::string& key) {
    const Entry* entry = find(key);
    if (entry == nullptr) {
      throw ParseError("section [" + section_.name + "] is missing key '" + key + "'",
                       section_.line);
    }
    return *entry;
  }

  void reject_unused() const {
    for (const auto& [key, entry] : section_.entries) {
      if (!entry.used) {
        throw ParseError("unknown key '" + key + "' in section [" + section_.name + "]",
                         entry.line);
      }
    }
  }

 private:
  Section& section_;
};

}  // namespace

Scenario parse_scenario(std::string_view text) {
  std::vector<Section> sections = tokenize(text);
  for (std::size_t i = 0; i < sections.size(); ++i) {
    for (std::size_t j = i + 1; j < sections.size(); ++j) {
      if (sections[i].name == sections[j].name) {
        throw ParseError("duplicate section [" + sections[j].name + "]", sections[j].line);
      }
    }
  }
  auto find_section = [&sections](std::string_view name) -> Section* {
    for (auto& section : sections) {
      if (section.name == name) return &section;
    }
    return nullptr;
  };

  Scenario scenario;

  Section* labels_section = find_section("labels");
  if (labels_section == nullptr) throw ParseError("missing [labels] section", 1);
  SectionReader labels(*labels_section);
  std::vector<double> label_prior;
  if (const Entry* size = labels.find("size")) {
    if (labels.find("prior") != nullptr) {
      throw ParseError("[labels] takes either 'size' or 'prior', not both", size->line);
    }
    const int n = parse_int(size->value, size->line);
    if (n < 1) throw ParseError("label count must be >= 1", size->line);
    label_prior.assign(static_cast<std::size_t>(n), 1.0 / static_cast<double>(n));
  } else {
    const Entry& prior = labels.require("prior");
    label_prior = parse_list(prior.value, prior.line);
    normalize_mass(label_prior, "label prior");
  }
  labels.reject_unused();
  scenario.label_alphabet = Alphabet::indexed("y", static_cast<int>(label_prior.size()));

  Section* sites_section = find_section("sites");
  if (sites_section == nullptr) throw ParseError("missing [sites] section", 1);
  SectionReader sites(*sites_section);
  const Entry& names_entry = sites.require("names");
  const std::vector<std::string> site_names = parse_names(names_entry.value, names_entry.line);
  scenario.site_alphabet = Alphabet("s", site_names);
  std::vector<double> site_prior(site_names.size(), 1.0 / static_cast<double>(site_names.size()));
  if (const Entry* prior = sites.find("prior")) {
    site_prior = parse_list(prior->value, prior->line);
    if (site_prior.size() != site_names.size()) {
      throw ParseError("site prior has " + std::to_string(site_prior.size()) +
                       " entries for " + std::to_string(site_names.size()) + " sites",
                       prior->line);
    }
    normalize_mass(site_prior, "site prior");
  }
  sites.reject_unused();

  if (Section* coupling_section = find_section("coupling")) {
    SectionReader coupling(*coupling_section);
    const Entry& joint = coupling.require("joint");
    std::vector<double> table = parse_list(joint.value, joint.line);
    const std::size_t expected = label_prior.size() * site_names.size();
    if (table.size() != expected) {
      throw ParseError("coupling joint has " + std::to_string(table.size()) +
                       " entries, expected " + std::to_string(expected), joint.line);
    }
    normalize_mass(table, "coupling joint");
    coupling.reject_unused();
    scenario.coupling = JointCoupling{std::move(table)};
  } else {
    scenario.coupling = IndependentCoupling{std::move(label_prior), std::move(site_prior)};
  }

  const int y_size = scenario.label_alphabet.size();
  int observation_size = 1;
  std::vector<std::optional<ScannerModel>> scanners(site_names.size());
  for (auto& section : sections) {
    if (!section.name.starts_with("scanner.")) continue;
    const std::string site_name = section.name.substr(8);
    const auto site_it = std::find(site_names.begin(), site_names.end(), site_name);
    if (site_it == site_names.end()) {
      throw ParseError("scanner declared for unknown site '" + site_name + "'", section.line);
    }
    const int site = static_cast<int>(site_it - site_names.begin());
    if (scanners[static_cast<std::size_t>(site)].has_value()) {
      throw ParseError("site '" + site_name + "' has more than one scanner section",
                       section.line);
    }

    SectionReader reader(section);
    const Entry& kind = reader.require("kind");
    ScannerModel model;
    model.site = site;
    if (kind.value == "bsc") {
      const Entry& epsilon = reader.require("epsilon");
      const double crossover = parse_double(epsilon.value, epsilon.line);
      if (!(crossover >= 0.0 && crossover <= 1.0)) {
        throw ParseError("scanner '" + site_name + "' epsilon must lie in [0,1]",
                         epsilon.line);
      }
      if (y_size != 2) {
        throw ParseError("scanner '" + site_name + "' is bsc but there are " +
                         std::to_string(y_size) + " labels", kind.line);
      }
      model.model = BscScanner{crossover};
    } else if (kind.value == "erasure") {
      const Entry& delta = reader.require("delta");
      const double erase_prob = parse_double(delta.value, delta.line);
      if (!(erase_prob >= 0.0 && erase_prob <= 1.0)) {
        throw ParseError("scanner '" + site_name + "' delta must lie in [0,1]", delta.line);
      }
      model.model = ErasureScanner{erase_prob};
    } else if (kind.value == "explicit") {
      const Entry& x_size_entry = reader.require("x_size");
      const int x_size = parse_int(x_size_entry.value, x_size_entry.line);
      if (x_size < 1) throw ParseError("x_size must be >= 1", x_size_entry.line);
      const Entry& rows_entry = reader.require("rows");
      std::vector<double> rows = parse_list(rows_entry.value, rows_entry.line);
      if (rows.size() != static_cast<std::size_t>(y_size) * static_cast<std::size_t>(x_size)) {
        throw ParseError("scanner '" + site_name + "' rows have " +
                         std::to_string(rows.size()) + " entries, expected " +
                         std::to_string(y_size * x_size), rows_entry.line);
      }
      for (int y = 0; y < y_size; ++y) {
        auto row = std::span<double>(rows).subspan(
            static_cast<std::size_t>(y) * static_cast<std::size_t>(x_size),
            static_cast<std::size_t>(x_size));
        try {
          normalize_mass(row, "row " + std::to_string(y));
        } catch (const ValidationError& error) {
          throw ParseError("scanner '" + site_name + "' " + error.what(), rows_entry.line);
        }
      }
      model.model = ExplicitScanner{Channel(scenario.label_alphabet,
                                            Alphabet::indexed("x", x_size), std::move(rows))};
    } else {
      throw ParseError("unknown scanner kind '" + kind.value + "'", kind.line);
    }
    reader.reject_unused();
    observation_size = std::max(observation_size, model.min_observation_size(y_size));
    scanners[static_cast<std::size_t>(site)] = std::move(model);
  }

  for (std::size_t site = 0; site < scanners.size(); ++site) {
    if (!scanners[site].has_value()) {
      throw ParseError("missing [scanner." + site_names[site] + "] section", 1);
    }
    scenario.scanners.push_back(std::move(*scanners[site]));
  }

  for (const auto& section : sections) {
    if (!section.used) {
      throw ParseError("unknown section [" + section.name + "]", section.line);
    }
  }

  scenario.observation_alphabet = Alphabet::indexed("x", observation_size);
  scenario.validate();
  return scenario;
}

std::string format_real(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace {

std::string format_list(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_real(values[i]);
  }
  return out;
}

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ',';
    out += names[i];
  }
  return out;
}

}  // namespace

std::string serialize_scenario(const Scenario& scenario) {
  std::ostringstream os;
  os << "[labels]\n";
  if (const auto* independent = std::get_if<IndependentCoupling>(&scenario.coupling)) {
    os << "prior = " << format_list(independent->label_prior) << "\n";
  } else {
    os << "size = " << scenario.label_alphabet.size() << "\n";
  }
  os << "[sites]\n";
  os << "names = " << join(scenario.site_alphabet.labels) << "\n";
  if (const auto* independent = std::get_if<IndependentCoupling>(&scenario.coupling)) {
    os << "prior = " << format_list(independent->site_prior) << "\n";
  } else {
    os << "[coupling]\n";
    os << "joint = " << format_list(std::get<JointCoupling>(scenario.coupling).joint_ys)
       << "\n";
  }
  for (const auto& scanner : scenario.scanners) {
    os << "[scanner." << scenario.site_alphabet.labels[static_cast<std::size_t>(scanner.site)]
       << "]\n";
    if (const auto* bsc = std::get_if<BscScanner>(&scanner.model)) {
      os << "kind = bsc\n";
      os << "epsilon = " << format_real(bsc->crossover) << "\n";
    } else if (const auto* erasure = std::get_if<ErasureScanner>(&scanner.model)) {
      os << "kind = erasure\n";
      os << "delta = " << format_real(erasure->erase_prob) << "\n";
    } else {
      const Channel& rows = std::get<ExplicitScanner>(scanner.model).rows;
      os << "kind = explicit\n";
      os << "x_size = " << rows.output().size() << "\n";
      os << "rows = " << format_list(rows.rows()) << "\n";
    }
  }
  return std::move(os).str();
}

Encoder parse_encoder(std::string_view text, const Alphabet& observations) {
  std::vector<Section> sections = tokenize(text);
  if (sections.size() != 1 || sections.front().name != "encoder") {
    throw ParseError("encoder file needs exactly one [encoder] section",
                     sections.empty() ? 1 : sections.front().line);
  }
  SectionReader reader(sections.front());
  const Entry& z_entry = reader.require("z_size");
  const int z_size = parse_int(z_entry.value, z_entry.line);
  if (z_size < 1) throw ParseError("z_size must be >= 1", z_entry.line);
  const Entry& rows_entry = reader.require("rows");
  std::vector<double> rows = parse_list(rows_entry.value, rows_entry.line);
  reader.reject_unused();
  const std::size_t expected =
      static_cast<std::size_t>(observations.size()) * static_cast<std::size_t>(z_size);
  if (rows.size() != expected) {
    throw ParseError("encoder rows have " + std::to_string(rows.size()) +
                     " entries, expected " + std::to_string(expected), rows_entry.line);
  }
  try {
    return stochastic_encoder(observations, std::move(rows), z_size);
  } catch (const ValidationError& error) {
    throw ParseError(std::string("encoder ") + error.what(), rows_entry.line);
  }
}

std::string serialize_encoder(const Encoder& encoder) {
  std::ostringstream os;
  os << "[encoder]\n";
  os << "z_size = " << encoder.z_alphabet().size() << "\n";
  os << "rows = " << format_list(encoder.channel.rows()) << "\n";
  return std::move(os).str();
}

}  // namespace invarlab
