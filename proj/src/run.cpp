#include "invarlab/run.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "invarlab/report_io.hpp"
#include "invarlab/scenario_format.hpp"

namespace invarlab {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw UsageError("failed writing '" + path.string() + "'");
}

TradeoffMode parse_mode(const std::string& mode) {
  if (mode == "info") return TradeoffMode::Info;
  if (mode == "risk") return TradeoffMode::Risk;
  throw UsageError("unknown mode '" + mode + "' (expected info or risk)");
}

ScannerFamily parse_family(const std::string& family) {
  if (family == "identical") return ScannerFamily::Identical;
  if (family == "independent-random") return ScannerFamily::IndependentRandom;
  if (family == "free-random") return ScannerFamily::FreeRandom;
  throw UsageError("unknown scanner family '" + family + "'");
}

OptimizeOptions optimize_options(const RunConfig& config) {
  OptimizeOptions options;
  options.z_size = config.z_size;
  options.restarts = config.restarts;
  options.max_iters = config.max_iters;
  options.tolerance = config.tolerance;
  options.seed = config.seed;
  return options;
}

Encoder resolve_encoder(const RunConfig& config, const JointDistribution& joint) {
  const Alphabet& observations = joint.axis(kObservationAxis);
  if (config.encoder_spec == "identity") {
    return identity_encoder(observations);
  }
  if (config.encoder_spec == "constant") {
    return constant_encoder(observations, config.z_size > 0 ? config.z_size : 1);
  }
  if (config.encoder_spec == "enumerate") {
    const int z = config.z_size > 0 ? config.z_size : observations.size();
    return enumerate_deterministic_optimum(joint, z, config.invariance_tolerance).encoder;
  }
  if (config.encoder_spec == "optimize") {
    return lagrangian_optimize(joint, config.lambda, parse_mode(config.mode),
                               optimize_options(config))
        .encoder;
  }
  return parse_encoder(read_file(config.encoder_spec), observations);
}

JsonValue config_echo(const RunConfig& config) {
  JsonValue echo = JsonValue::object();
  echo.set("command", config.command);
  echo.set("scenario", config.scenario_path);
  echo.set("encoder", config.encoder_spec);
  echo.set("z_size", config.z_size);
  echo.set("lambda", config.lambda);
  echo.set("lambda_min", config.lambda_min);
  echo.set("lambda_max", config.lambda_max);
  echo.set("lambda_points", config.lambda_points);
  echo.set("mode", config.mode);
  echo.set("restarts", config.restarts);
  echo.set("max_iters", config.max_iters);
  echo.set("tolerance", config.tolerance);
  echo.set("invariance_tolerance", config.invariance_tolerance);
  echo.set("slack_margin", config.slack_margin);
  echo.set("seed", static_cast<std::int64_t>(config.seed));
  echo.set("instances", config.instances);
  echo.set("scanner_family", config.scanner_family);
  JsonValue sizes = JsonValue::object();
  sizes.set("labels", config.sizes.labels);
  sizes.set("sites", config.sizes.sites);
  sizes.set("observations", config.sizes.observations);
  echo.set("sizes", std::move(sizes));
  echo.set("concentration", config.concentration);
  echo.set("label", config.label);
  echo.set("home_site", config.home_site);
  echo.set("out", config.out_dir);
  return echo;
}

JsonValue bundle(const RunConfig& config) {
  JsonValue root = JsonValue::object();
  root.set("tool", kToolName);
  root.set("version", kToolVersion);
  root.set("seed", static_cast<std::int64_t>(config.seed));
  root.set("config", config_echo(config));
  return root;
}

Scenario load_scenario(const RunConfig& config) {
  if (config.scenario_path.empty()) {
    throw UsageError("command '" + config.command + "' needs --scenario");
  }
  return parse_scenario(read_file(config.scenario_path));
}

void run_command(const RunConfig& config, const std::filesystem::path& out_dir) {
  if (config.command == "search") {
    SearchConfig search;
    search.instances = config.instances;
    search.seed = config.seed;
    search.sizes = config.sizes;
    search.z_size = config.z_size;
    search.invariance_tolerance = config.invariance_tolerance;
    search.slack_margin = config.slack_margin;
    search.scanner_family = parse_family(config.scanner_family);
    search.concentration = config.concentration;
    const SearchCatalog catalog = counterexample_search(search);

    JsonValue root = bundle(config);
    root.set("catalog", to_json(catalog));
    write_file(out_dir / "catalog.json", root.dump());
    write_file(out_dir / "summary.csv", search_summary_csv(catalog));
    return;
  }

  const Scenario scenario = load_scenario(config);
  const JointDistribution joint = build_joint(scenario);
  const Alphabet& sites = scenario.site_alphabet;
  const Alphabet& labels = scenario.label_alphabet;

  if (config.command == "info") {
    const Encoder encoder = resolve_encoder(config, joint);
    const InformationReport report = evaluate_encoder(joint, encoder);
    const SiteInformationProfile profile = per_site_information(joint);
    JsonValue root = bundle(config);
    root.set("information", to_json(report, sites, labels));
    root.set("site_profile", to_json(profile, sites));
    root.set("encoder", serialize_encoder(encoder));
    write_file(out_dir / "report.json", root.dump());
    return;
  }

  if (config.command == "frontier") {
    const std::vector<double> grid =
        default_lambda_grid(config.lambda_min, config.lambda_max, config.lambda_points);
    const Frontier frontier =
        sweep_frontier(joint, grid, parse_mode(config.mode), optimize_options(config));
    write_file(out_dir / "frontier.csv", frontier_csv(frontier));
    write_file(out_dir / "pareto.csv", pareto_csv(frontier));
    JsonValue root = bundle(config);
    root.set("frontier", to_json(frontier, sites, labels));
    write_file(out_dir / "report.json", root.dump());
    return;
  }

  if (config.command == "prop1") {
    const Encoder encoder = resolve_encoder(config, joint);
    const Prop1Report report = check_prop1(joint, encoder,
                                           Prop1Tolerances{1e-9, 1e-7});
    JsonValue root = bundle(config);
    root.set("prop1", to_json(report, sites));
    root.set("encoder", serialize_encoder(encoder));
    write_file(out_dir / "prop1.json", root.dump());
    return;
  }

  if (config.command == "prop2") {
    int label = config.label;
    int home_site = config.home_site;
    if (label < 0) {
      for (const auto& entry : site_exclusive_labels(joint)) {
        if (entry.exclusive) {
          label = entry.label;
          home_site = entry.sites.front();
          break;
        }
      }
      if (label < 0) {
        throw UsageError("scenario has no site-exclusive label; pass --label");
      }
    } else if (home_site < 0) {
      const auto table = site_exclusive_labels(joint);
      if (label >= static_cast<int>(table.size()) ||
          !table[static_cast<std::size_t>(label)].exclusive) {
        throw UsageError("label " + std::to_string(label) + " is not site-exclusive");
      }
      home_site = table[static_cast<std::size_t>(label)].sites.front();
    }
    const Encoder encoder = resolve_encoder(config, joint);
    const Prop2Report report = check_prop2(joint, encoder, label, home_site);
    JsonValue root = bundle(config);
    root.set("prop2", to_json(report, sites, labels));
    root.set("encoder", serialize_encoder(encoder));
    write_file(out_dir / "prop2.json", root.dump());
    return;
  }

  throw UsageError("unknown command '" + config.command + "'");
}

}  // namespace

int dispatch(const RunConfig& config) {
  try {
    const std::filesystem::path out_dir(config.out_dir.empty() ? "." : config.out_dir);
    std::filesystem::create_directories(out_dir);
    run_command(config, out_dir);
    return kExitOk;
  } catch (const CapacityError& error) {
    std::cerr << "capacity error: " << error.what() << "\n";
    return kExitCapacity;
  } catch (const NumericalError& error) {
    std::cerr << "numerical error: " << error.what() << "\n";
    return kExitNumerical;
  } catch (const ParseError& error) {
    std::cerr << "parse error (line " << error.line_number << "): " << error.what() << "\n";
    return kExitUsage;
  } catch (const Error& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace invarlab
