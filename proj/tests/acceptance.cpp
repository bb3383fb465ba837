// Acceptance suite: every release gate in one binary, one line per check.
// Exits nonzero if any gate fails.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "invarlab/lab.hpp"
#include "invarlab/optimize.hpp"
#include "invarlab/run.hpp"
#include "invarlab/scenario_format.hpp"

using namespace invarlab;
namespace fs = std::filesystem;

namespace {

struct Gate {
  std::vector<std::string> failures;

  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }

  void close(double actual, double expected, double tolerance, const std::string& what) {
    if (!(std::abs(actual - expected) <= tolerance)) {
      std::ostringstream os;
      os << what << ": got " << format_real(actual) << ", expected "
         << format_real(expected) << " within " << tolerance;
      failures.push_back(os.str());
    }
  }
};

struct Criterion {
  std::string name;
  double budget_seconds;
  std::function<void(Gate&)> run;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

// 1. closed-form channel oracle
void criterion_bsc_oracle(Gate& gate) {
  for (int i = 0; i <= 10; ++i) {
    const double eps = 0.05 * i;
    const JointDistribution joint = build_joint(two_site_bsc_scenario(eps, eps));
    const SiteInformationProfile profile = per_site_information(joint);
    const double expected = 1.0 - testutil::h2_ref(eps);
    for (const auto& [site, bits] : profile.per_site) {
      gate.close(bits, expected, 1e-9,
                 "per-site information at crossover " + format_real(eps));
    }
  }
}

// 2. information cannot grow through a channel
void criterion_dpi(Gate& gate) {
  Rng rng(0xD1D1);
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int ny = 2 + rng.uniform_int(5);
    const int nx = 2 + rng.uniform_int(5);
    const int nz = 2 + rng.uniform_int(5);
    const JointDistribution joint = testutil::random_joint(rng, {ny, nx});
    const Channel channel =
        testutil::random_channel(rng, joint.axis(1), Alphabet::indexed("z", nz));
    const JointDistribution pushed =
        push_through_channel(joint, 1, channel, ChannelMode::Replace);
    const int a_group[] = {0};
    const int b_group[] = {1};
    if (mutual_information(pushed, a_group, b_group) >
        mutual_information(joint, a_group, b_group) + 1e-9) {
      ++failures;
    }
  }
  gate.require(failures == 0,
               std::to_string(failures) + " of 1000 channel pairs gained information");
}

// 3. entropy identity and the chain rule
void criterion_identities(Gate& gate) {
  Rng rng(0x1DE);
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int na = 2 + rng.uniform_int(4);
    const int nb = 2 + rng.uniform_int(4);
    const int nc = 2 + rng.uniform_int(3);
    const JointDistribution joint = testutil::random_joint(rng, {na, nb, nc});
    const int a_group[] = {0};
    const int b_group[] = {1};
    const int c_group[] = {2};
    const int ab_group[] = {0, 1};
    const int bc_group[] = {1, 2};

    const double identity = entropy(marginalize(joint, a_group)) +
                            entropy(marginalize(joint, b_group)) -
                            entropy(marginalize(joint, ab_group));
    if (std::abs(mutual_information(joint, a_group, b_group) - identity) > 1e-9) ++failures;

    const double chain_lhs = mutual_information(joint, a_group, bc_group);
    const double chain_rhs =
        mutual_information(joint, a_group, c_group) +
        conditional_mutual_information(joint, a_group, b_group, 2).bits;
    if (std::abs(chain_lhs - chain_rhs) > 1e-9) ++failures;
  }
  gate.require(failures == 0,
               std::to_string(failures) + " of 1000 joints broke an identity");
}

// 4. identical per-site channels: the bound and the proof identity hold
void criterion_identical_channel_bound(Gate& gate) {
  int worst_instance = -1;
  double worst_slack = 0.0;
  double worst_deviation = 0.0;
  for (int instance = 0; instance < 500; ++instance) {
    Rng pick(mix_seed(0xAB5, static_cast<std::uint64_t>(instance)));
    const ScenarioSizes sizes{2 + pick.uniform_int(3), 2 + pick.uniform_int(2),
                              2 + pick.uniform_int(3)};
    const double concentration = 0.4 + 1.2 * pick.uniform();
    const Scenario scenario = identical_scanner_scenario(
        mix_seed(0x5CA, static_cast<std::uint64_t>(instance)), sizes, concentration);
    const JointDistribution joint = build_joint(scenario);
    const EnumerationResult best = enumerate_deterministic_optimum(
        joint, joint.axis(kObservationAxis).size(), 1e-9);
    const Prop1Report report = check_prop1(joint, best.encoder);
    if (report.identity_deviation > worst_deviation) {
      worst_deviation = report.identity_deviation;
      worst_instance = instance;
    }
    if (report.slack < worst_slack) {
      worst_slack = report.slack;
      worst_instance = instance;
    }
    if (!report.hypothesis_satisfied) {
      gate.require(false, "instance " + std::to_string(instance) + " failed the hypothesis");
      return;
    }
  }
  gate.require(worst_deviation <= 1e-7,
               "identity deviation " + format_real(worst_deviation) + " at instance " +
                   std::to_string(worst_instance));
  gate.require(worst_slack >= -1e-7, "slack " + format_real(worst_slack) + " at instance " +
                                         std::to_string(worst_instance));

  // the randomized search agrees: identical channels never produce a violation
  SearchConfig search;
  search.instances = 500;
  search.seed = 0xCA7;
  search.sizes = ScenarioSizes{3, 2, 3};
  search.scanner_family = ScannerFamily::Identical;
  const SearchCatalog catalog = counterexample_search(search);
  gate.require(catalog.entries.empty(),
               "identical-channel search logged " + std::to_string(catalog.entries.size()) +
                   " violations");
}

// 5. the mismatched-noise probe instance, exact numbers
void criterion_probe_instance(Gate& gate) {
  const JointDistribution joint = build_joint(two_site_bsc_scenario(0.1, 0.4));
  const Encoder encoder = identity_encoder(joint.axis(kObservationAxis));
  const Prop1Report report = check_prop1(joint, encoder);

  gate.require(report.hypothesis_i_s_y <= 1e-12, "I(s,y) above 1e-12");
  gate.require(report.hypothesis_i_z_s <= 1e-12, "I(z,s) above 1e-12");
  gate.close(report.lhs, 0.18872187554086717, 1e-6, "I(y,z)");
  gate.close(report.rhs, 0.02904940554533142, 1e-6, "min-site I(y,x|s)");
  gate.require(report.per_site_i_y_z.size() == 2, "expected two per-site values");
  gate.close(report.per_site_i_y_z[0].second, 0.5310044064107188, 1e-6, "I(y,z|s=A)");
  gate.close(report.per_site_i_y_z[1].second, 0.02904940554533142, 1e-6, "I(y,z|s=B)");
  // golden verdict: the hypotheses hold, the bound does not
  gate.require(report.verdict == Prop1Verdict::Violated,
               "expected verdict 'violated', got " + to_string(report.verdict));
  gate.close(report.identity_deviation, 0.3422825308698516, 1e-6, "identity deviation");
}

// 6. prediction of a site-exclusive label under invariance
void criterion_site_exclusive(Gate& gate) {
  const JointDistribution joint = build_joint(site_exclusive_scenario());
  const Alphabet& x = joint.axis(kObservationAxis);

  const EnumerationResult result = enumerate_deterministic_optimum(joint, 3, 1e-9);
  gate.require(result.feasible_count == 3,
               "expected exactly the 3 constant maps to be feasible, got " +
                   std::to_string(result.feasible_count));
  gate.require(result.report.i_y_z <= 1e-9,
               "invariant optimum carries label information: " +
                   format_real(result.report.i_y_z));

  // every exactly invariant encoder equalizes prediction rates across sites
  Rng rng(0xEC0);
  double worst_gap = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto row0 = rng.dirichlet(2, 1.0);
    const auto row1 = rng.dirichlet(2, 1.0);
    const std::vector<double> rows = {row0[0], row0[1], row1[0], row1[1],
                                      0.5 * (row0[0] + row1[0]), 0.5 * (row0[1] + row1[1])};
    const Encoder encoder = stochastic_encoder(x, rows, 2);
    const InformationReport info = evaluate_encoder(joint, encoder);
    if (info.i_z_s > 1e-9) continue;
    const Prop2Report report = check_prop2(joint, encoder, 2, 1);
    worst_gap = std::max(worst_gap, report.rate_gap);
  }
  for (int map_code = 0; map_code < 27; ++map_code) {
    const std::vector<int> map = {map_code / 9, (map_code / 3) % 3, map_code % 3};
    const Encoder encoder = deterministic_encoder(x, map, 3);
    const InformationReport info = evaluate_encoder(joint, encoder);
    if (info.i_z_s > 1e-9) continue;
    const Prop2Report report = check_prop2(joint, encoder, 2, 1);
    worst_gap = std::max(worst_gap, report.rate_gap);
  }
  gate.require(worst_gap <= 1e-6,
               "an invariant encoder split prediction rates by " + format_real(worst_gap));

  const Prop2Report identity_report = check_prop2(joint, identity_encoder(x), 2, 1);
  gate.close(identity_report.recall_at_home, 1.0, 1e-12, "identity recall at home");
  gate.require(identity_report.i_z_s > 0.01,
               "identity encoder should leak site information, got " +
                   format_real(identity_report.i_z_s));
}

// 7. optimizer soundness: gradients, capacity at lambda=0, invariance at 1e3
void criterion_optimizer(Gate& gate) {
  Rng rng(0x90AD);
  int gradient_checked = 0;
  double worst_rel = 0.0;
  while (gradient_checked < 100) {
    const Scenario scenario = random_scenario(rng.next_u64(), ScenarioSizes{3, 2, 3},
                                              gradient_checked % 2 == 0);
    const JointDistribution joint = build_joint(scenario);
    const int z_size = 2 + gradient_checked % 2;
    std::vector<double> rows;
    for (int x = 0; x < joint.axis(kObservationAxis).size(); ++x) {
      auto row = rng.dirichlet(static_cast<std::size_t>(z_size), 5.0);
      for (double& v : row) v = 0.9 * v + 0.1 / static_cast<double>(z_size);
      rows.insert(rows.end(), row.begin(), row.end());
    }
    const double lambda = 3.0 * rng.uniform();
    const ObjectiveEval eval =
        lagrangian_objective(joint, rows, z_size, lambda, TradeoffMode::Info);
    const double step = 1e-6;
    double err = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::vector<double> plus = rows;
      std::vector<double> minus = rows;
      plus[i] += step;
      minus[i] -= step;
      const double fd =
          (lagrangian_objective(joint, plus, z_size, lambda, TradeoffMode::Info).value -
           lagrangian_objective(joint, minus, z_size, lambda, TradeoffMode::Info).value) /
          (2.0 * step);
      err += (eval.gradient[i] - fd) * (eval.gradient[i] - fd);
      norm += fd * fd;
    }
    worst_rel = std::max(worst_rel, std::sqrt(err) / std::max(std::sqrt(norm), 1e-12));
    ++gradient_checked;
  }
  gate.require(worst_rel <= 1e-4,
               "gradient relative error " + format_real(worst_rel) + " above 1e-4");

  OptimizeOptions options;
  options.z_size = 2;
  const JointDistribution identical = build_joint(two_site_bsc_scenario(0.1, 0.1));
  const TradeoffPoint unconstrained =
      lagrangian_optimize(identical, 0.0, TradeoffMode::Info, options);
  gate.close(unconstrained.objective_value, 0.5310044064107188, 1e-6,
             "lambda=0 objective on the matched-noise scenario");

  const JointDistribution exclusive = build_joint(site_exclusive_scenario());
  const TradeoffPoint invariant =
      lagrangian_optimize(exclusive, 1e3, TradeoffMode::Info);
  gate.require(invariant.report.i_z_s <= 1e-6,
               "lambda=1e3 left I(z,s) = " + format_real(invariant.report.i_z_s));
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Scenario scenario = random_scenario(seed, ScenarioSizes{3, 3, 3}, false);
    OptimizeOptions opts;
    opts.seed = seed;
    const TradeoffPoint point =
        lagrangian_optimize(build_joint(scenario), 1e3, TradeoffMode::Info, opts);
    gate.require(point.report.i_z_s <= 1e-6,
                 "lambda=1e3 left I(z,s) = " + format_real(point.report.i_z_s) +
                     " on random scenario " + std::to_string(seed));
  }
}

// 8. byte-identical outputs for repeated seeded runs
void criterion_determinism(Gate& gate) {
  const fs::path base =
      fs::temp_directory_path() / ("invarlab_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(base);
  fs::create_directories(base);

  const fs::path scenario_path = base / "two_site.scn";
  std::ofstream(scenario_path, std::ios::binary)
      << serialize_scenario(two_site_bsc_scenario(0.1, 0.4));

  RunConfig frontier;
  frontier.command = "frontier";
  frontier.scenario_path = scenario_path.string();
  frontier.lambda_points = 7;
  frontier.restarts = 6;
  frontier.max_iters = 2000;
  frontier.seed = 42;
  frontier.out_dir = (base / "frontier").string();
  gate.require(dispatch(frontier) == kExitOk, "frontier run failed");
  std::map<std::string, std::string> frontier_bytes;
  for (const char* name : {"frontier.csv", "pareto.csv", "report.json"}) {
    frontier_bytes[name] = read_file(base / "frontier" / name);
  }
  gate.require(dispatch(frontier) == kExitOk, "second frontier run failed");
  for (const auto& [name, bytes] : frontier_bytes) {
    gate.require(read_file(base / "frontier" / name) == bytes,
                 std::string(name) + " changed between identical frontier runs");
  }

  RunConfig search;
  search.command = "search";
  search.instances = 40;
  search.seed = 42;
  search.scanner_family = "free-random";
  search.sizes = ScenarioSizes{2, 2, 2};
  search.out_dir = (base / "search").string();
  gate.require(dispatch(search) == kExitOk, "search run failed");
  std::map<std::string, std::string> search_bytes;
  for (const char* name : {"catalog.json", "summary.csv"}) {
    search_bytes[name] = read_file(base / "search" / name);
  }
  gate.require(dispatch(search) == kExitOk, "second search run failed");
  for (const auto& [name, bytes] : search_bytes) {
    gate.require(read_file(base / "search" / name) == bytes,
                 std::string(name) + " changed between identical search runs");
  }

  fs::remove_all(base);
}

// 9. the exact decision rule really is optimal
void criterion_bayes_optimality(Gate& gate) {
  Rng rng(0xBAE5);
  int checked = 0;
  int beaten = 0;
  while (checked < 200) {
    const int ny = 2 + rng.uniform_int(3);
    const int nz = 2 + rng.uniform_int(3);
    if (ny * nz > 12) continue;
    const JointDistribution joint = testutil::random_joint(rng, {ny, nz});
    const auto [predictor, risk] = bayes_predictor(joint);

    std::vector<int> decision(static_cast<std::size_t>(nz), 0);
    double best = 1.0;
    for (;;) {
      double correct = 0.0;
      for (int z = 0; z < nz; ++z) {
        const int idx[] = {decision[static_cast<std::size_t>(z)], z};
        correct += joint.at(idx);
      }
      best = std::min(best, 1.0 - correct);
      int pos = nz - 1;
      while (pos >= 0 && ++decision[static_cast<std::size_t>(pos)] == ny) {
        decision[static_cast<std::size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
    if (risk > best + 1e-12) ++beaten;
    ++checked;
  }
  gate.require(beaten == 0, std::to_string(beaten) +
                                " of 200 joints had a better deterministic predictor");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"closed-form channel oracle", 1.0, criterion_bsc_oracle},
      {"data processing inequality, 1000 random channel pairs", 30.0, criterion_dpi},
      {"information identities, 1000 random joints", 30.0, criterion_identities},
      {"identical-channel bound over 500 scenarios", 300.0, criterion_identical_channel_bound},
      {"mismatched-noise probe instance", 1.0, criterion_probe_instance},
      {"site-exclusive label mechanism", 5.0, criterion_site_exclusive},
      {"optimizer soundness", 120.0, criterion_optimizer},
      {"byte-identical seeded runs", 120.0, criterion_determinism},
      {"exact decision rule optimality, 200 joints", 30.0, criterion_bayes_optimality},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& criterion = criteria[i];
    Gate gate;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.run(gate);
    } catch (const std::exception& error) {
      gate.failures.push_back(std::string("exception: ") + error.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > criterion.budget_seconds) {
      std::ostringstream os;
      os << "runtime " << elapsed << "s exceeded the " << criterion.budget_seconds
         << "s budget";
      gate.failures.push_back(os.str());
    }
    const bool ok = gate.failures.empty();
    std::printf("[%s] criterion %zu: %s (%.2fs)\n", ok ? "PASS" : "FAIL", i + 1,
                criterion.name.c_str(), elapsed);
    for (const auto& failure : gate.failures) {
      std::printf("       %s\n", failure.c_str());
    }
    if (!ok) ++failed;
  }
  if (failed > 0) {
    std::printf("%d of %zu acceptance criteria failed\n", failed, criteria.size());
  } else {
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  }
  return failed;
}
