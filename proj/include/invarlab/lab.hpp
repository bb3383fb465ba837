#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "invarlab/prob.hpp"
#include "invarlab/scenario.hpp"

namespace invarlab {

/// Cap on deterministic encoder enumeration (z_size ^ |X| maps).
inline constexpr std::uint64_t kEnumerationCap = 1'000'000;

/// The representation arm q(z | x).
struct Encoder {
  Channel channel;
  const Alphabet& z_alphabet() const { return channel.output(); }
  bool operator==(const Encoder&) const = default;
};

Encoder identity_encoder(const Alphabet& observations);
Encoder constant_encoder(const Alphabet& observations, int z_size = 1);
Encoder deterministic_encoder(const Alphabet& observations, std::span<const int> map,
                              int z_size);
/// Arbitrary row-stochastic encoder table, row-major |X| x z_size.
Encoder stochastic_encoder(const Alphabet& observations, std::vector<double> rows,
                           int z_size);

/// Deterministic decision rule z -> y.
struct Predictor {
  std::vector<int> decision;
  bool operator==(const Predictor&) const = default;
};

/// Exact Bayes decision rule for 0-1 risk on a (label, representation)
/// joint; ties go to the lowest label index. Returns the rule and its risk.
std::pair<Predictor, double> bayes_predictor(const JointDistribution& joint_yz);

/// Every audited quantity for one (scenario joint, encoder) pair.
struct InformationReport {
  double i_y_z = 0.0;
  double i_z_s = 0.0;
  double i_s_y = 0.0;
  double i_y_yhat = 0.0;
  double i_yhat_s = 0.0;
  std::vector<std::pair<int, double>> per_site_i_y_z;
  std::vector<std::pair<int, double>> per_site_i_y_x;
  double risk = 0.0;
  /// site -> p(yhat = v | s) over label values v; positive-mass sites only.
  std::vector<std::pair<int, std::vector<double>>> prediction_rates;
  std::vector<int> skipped_sites;
  Predictor predictor;
};

/// Push the scenario joint through the encoder and fill the full report.
InformationReport evaluate_encoder(const JointDistribution& joint_ysx,
                                   const Encoder& encoder);

/// Exhaustive search over deterministic maps X -> Z for the map maximizing
/// I(y,z) subject to I(z,s) <= invariance_tolerance.
struct EnumerationResult {
  std::vector<int> map;
  Encoder encoder;
  InformationReport report;
  std::uint64_t maps_scored = 0;
  std::uint64_t feasible_count = 0;
};

EnumerationResult enumerate_deterministic_optimum(const JointDistribution& joint_ysx,
                                                  int z_size,
                                                  double invariance_tolerance);

struct Prop1Tolerances {
  double hypothesis = 1e-9;  // bits; I(s,y) and I(z,s) must be below this
  double slack = 1e-7;       // bits; slack below -this is a violation
};

enum class Prop1Verdict { Holds, Violated, HypothesisNotMet };

std::string to_string(Prop1Verdict verdict);

/// Numerical audit of the worst-site information bound and its proof identity.
struct Prop1Report {
  double lhs = 0.0;   // I(y,z)
  double rhs = 0.0;   // min over sites of I(y,x|s)
  double slack = 0.0; // rhs - lhs
  int rhs_site = 0;   // site attaining the minimum
  double hypothesis_i_s_y = 0.0;
  double hypothesis_i_z_s = 0.0;
  bool hypothesis_satisfied = false;
  /// max over sites of |I(y,z|s=s') - I(y,z)|; zero when the per-site
  /// label-representation information really is site-independent.
  double identity_deviation = 0.0;
  std::vector<std::pair<int, double>> per_site_i_y_z;
  Prop1Verdict verdict = Prop1Verdict::Holds;
};

Prop1Report check_prop1(const JointDistribution& joint_ysx, const Encoder& encoder,
                        Prop1Tolerances tolerances = {});

/// Audit of prediction behaviour for a label observed at a single site.
struct Prop2Report {
  int exclusive_label = 0;
  int home_site = 0;
  double recall_at_home = 0.0;               // p(yhat = y' | y = y', s = home)
  double false_positive_rate_elsewhere = 0.0;  // p(yhat = y' | s != home)
  double rate_gap = 0.0;  // max over site pairs of |p(yhat=y'|s) - p(yhat=y'|s'')|
  double i_z_s = 0.0;
  std::vector<std::pair<int, double>> rate_by_site;  // p(yhat = y' | s)
};

Prop2Report check_prop2(const JointDistribution& joint_ysx, const Encoder& encoder,
                        int exclusive_label, int home_site);

enum class ScannerFamily { Identical, IndependentRandom, FreeRandom };

std::string to_string(ScannerFamily family);

struct SearchConfig {
  int instances = 100;
  std::uint64_t seed = 0;
  ScenarioSizes sizes{2, 2, 2};
  int z_size = 0;  // 0 means |X|
  double invariance_tolerance = 1e-9;
  double slack_margin = 1e-6;
  ScannerFamily scanner_family = ScannerFamily::FreeRandom;
  double concentration = 1.0;
};

struct SearchEntry {
  int instance = 0;
  Prop1Report report;
  Scenario scenario;
  std::vector<int> encoder_map;
};

struct SearchCatalog {
  SearchConfig config;
  int instances_run = 0;
  std::vector<SearchEntry> entries;  // every instance whose verdict is not Holds
};

/// Randomized stress test of the worst-site bound: per instance, enumerate
/// the invariant-optimal deterministic encoder and record any non-holding
/// verdict. Deterministic per seed.
SearchCatalog counterexample_search(const SearchConfig& config);

/// Two uniform sites observing a uniform binary label through binary
/// symmetric scanners with the given crossovers.
Scenario two_site_bsc_scenario(double crossover_a, double crossover_b);

/// Three labels, two uniform sites with identity scanners; label 2 occurs
/// only at the second site (p(y|A) = (1/2,1/2,0), p(y|B) = (1/3,1/3,1/3)).
Scenario site_exclusive_scenario();

/// One shared scanner at every site (forces site-independent observations).
Scenario identical_scanner_scenario(std::uint64_t seed, ScenarioSizes sizes,
                                    double concentration = 1.0);

}  // namespace invarlab
