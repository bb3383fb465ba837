#include <CLI11.hpp>

#include "invarlab/run.hpp"

namespace {

void add_scenario_flag(CLI::App* cmd, invarlab::RunConfig& config) {
  cmd->add_option("--scenario", config.scenario_path, "scenario file path")->required();
}

void add_encoder_flags(CLI::App* cmd, invarlab::RunConfig& config) {
  cmd->add_option("--encoder", config.encoder_spec,
                  "identity|constant|enumerate|optimize|FILE (default identity)");
  cmd->add_option("--z-size", config.z_size, "representation size (default |X|)");
  cmd->add_option("--lambda", config.lambda, "multiplier for --encoder optimize");
  cmd->add_option("--mode", config.mode, "optimizer objective: info|risk");
  cmd->add_option("--restarts", config.restarts, "optimizer restarts");
  cmd->add_option("--max-iters", config.max_iters, "optimizer iteration cap");
  cmd->add_option("--tolerance", config.tolerance, "optimizer stopping tolerance");
  cmd->add_option("--invariance-tol", config.invariance_tolerance,
                  "I(z,s) bound for --encoder enumerate");
}

void add_common_flags(CLI::App* cmd, invarlab::RunConfig& config) {
  cmd->add_option("--seed", config.seed, "random seed (default 0)");
  cmd->add_option("--out", config.out_dir, "output directory (default .)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact information-theoretic audits of site-invariant prediction"};
  app.require_subcommand(1);
  app.set_version_flag("--version",
                       std::string(invarlab::kToolName) + " " + invarlab::kToolVersion);

  invarlab::RunConfig config;

  CLI::App* info = app.add_subcommand(
      "info", "evaluate an encoder: information report and site profile");
  add_scenario_flag(info, config);
  add_encoder_flags(info, config);
  add_common_flags(info, config);

  CLI::App* frontier = app.add_subcommand(
      "frontier", "sweep the lambda grid and emit the trade-off curve");
  add_scenario_flag(frontier, config);
  frontier->add_option("--z-size", config.z_size, "representation size (default |X|)");
  frontier->add_option("--lambda-min", config.lambda_min, "smallest positive lambda");
  frontier->add_option("--lambda-max", config.lambda_max, "largest lambda");
  frontier->add_option("--lambda-points", config.lambda_points,
                       "log-spaced points (0 is always included)");
  frontier->add_option("--mode", config.mode, "optimizer objective: info|risk");
  frontier->add_option("--restarts", config.restarts, "optimizer restarts");
  frontier->add_option("--max-iters", config.max_iters, "optimizer iteration cap");
  frontier->add_option("--tolerance", config.tolerance, "optimizer stopping tolerance");
  add_common_flags(frontier, config);

  CLI::App* prop1 = app.add_subcommand(
      "prop1", "audit the worst-site information bound for an encoder");
  add_scenario_flag(prop1, config);
  add_encoder_flags(prop1, config);
  add_common_flags(prop1, config);

  CLI::App* prop2 = app.add_subcommand(
      "prop2", "audit prediction of a site-exclusive label for an encoder");
  add_scenario_flag(prop2, config);
  add_encoder_flags(prop2, config);
  prop2->add_option("--label", config.label, "exclusive label index (default: auto-detect)");
  prop2->add_option("--home-site", config.home_site,
                    "site index the label is exclusive to (default: derived)");
  add_common_flags(prop2, config);

  CLI::App* search = app.add_subcommand(
      "search", "randomized counterexample search over scenario instances");
  search->add_option("--instances", config.instances, "number of random instances");
  search->add_option("--scanner-family", config.scanner_family,
                     "identical|independent-random|free-random");
  search->add_option("--labels", config.sizes.labels, "label alphabet size");
  search->add_option("--sites", config.sizes.sites, "site alphabet size");
  search->add_option("--observations", config.sizes.observations,
                     "observation alphabet size");
  search->add_option("--z-size", config.z_size, "representation size (default |X|)");
  search->add_option("--invariance-tol", config.invariance_tolerance,
                     "I(z,s) bound for the enumerated encoder");
  search->add_option("--slack-margin", config.slack_margin,
                     "slack below -margin counts as a violation");
  search->add_option("--concentration", config.concentration,
                     "Dirichlet concentration of random instances");
  add_common_flags(search, config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    // CLI11 returns 0 for --help/--version; anything else is a usage error
    return code == 0 ? invarlab::kExitOk : invarlab::kExitUsage;
  }

  config.command = app.get_subcommands().front()->get_name();
  return invarlab::dispatch(config);
}
