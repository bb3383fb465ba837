#include "invarlab/lab.hpp"

#include <algorithm>
#include <cmath>

#include "invarlab/rng.hpp"

namespace invarlab {

namespace {

Alphabet representation_alphabet(int z_size) {
  return Alphabet::indexed("z", z_size);
}

/// I(row; col) in bits from a dense row-major joint table.
double information_from_table(std::span<const double> table, int rows, int cols) {
  std::vector<double> row_marginal(static_cast<std::size_t>(rows), 0.0);
  std::vector<double> col_marginal(static_cast<std::size_t>(cols), 0.0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double p = table[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                             static_cast<std::size_t>(c)];
      row_marginal[static_cast<std::size_t>(r)] += p;
      col_marginal[static_cast<std::size_t>(c)] += p;
    }
  }
  double bits = 0.0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double p = table[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                             static_cast<std::size_t>(c)];
      if (p == 0.0) continue;
      bits += p * std::log2(p / (row_marginal[static_cast<std::size_t>(r)] *
                                 col_marginal[static_cast<std::size_t>(c)]));
    }
  }
  if (bits < -kNegativeInformationTolerance) {
    throw NumericalError("table mutual information fell below -1e-10");
  }
  return std::max(bits, 0.0);
}

}  // namespace

Encoder identity_encoder(const Alphabet& observations) {
  const Alphabet z = representation_alphabet(observations.size());
  std::vector<int> map(static_cast<std::size_t>(observations.size()));
  for (int i = 0; i < observations.size(); ++i) map[static_cast<std::size_t>(i)] = i;
  return Encoder{Channel::deterministic(observations, z, map)};
}

Encoder constant_encoder(const Alphabet& observations, int z_size) {
  if (z_size < 1) throw UsageError("constant encoder needs z_size >= 1");
  return Encoder{Channel::constant(observations, representation_alphabet(z_size), 0)};
}

Encoder deterministic_encoder(const Alphabet& observations, std::span<const int> map,
                              int z_size) {
  if (z_size < 1) throw UsageError("deterministic encoder needs z_size >= 1");
  return Encoder{Channel::deterministic(observations, representation_alphabet(z_size), map)};
}

Encoder stochastic_encoder(const Alphabet& observations, std::vector<double> rows,
                           int z_size) {
  if (z_size < 1) throw UsageError("stochastic encoder needs z_size >= 1");
  return Encoder{Channel(observations, representation_alphabet(z_size), std::move(rows))};
}

std::pair<Predictor, double> bayes_predictor(const JointDistribution& joint_yz) {
  if (joint_yz.axis_count() != 2) {
    throw UsageError("bayes_predictor expects a (label, representation) joint");
  }
  const int y_size = joint_yz.axis(0).size();
  const int z_size = joint_yz.axis(1).size();
  Predictor predictor;
  predictor.decision.assign(static_cast<std::size_t>(z_size), 0);
  std::vector<double> kept(static_cast<std::size_t>(z_size), 0.0);
  for (int z = 0; z < z_size; ++z) {
    double best = -1.0;
    int best_y = 0;
    for (int y = 0; y < y_size; ++y) {
      const double p = joint_yz.mass()[static_cast<std::size_t>(y) *
                                           static_cast<std::size_t>(z_size) +
                                       static_cast<std::size_t>(z)];
      if (p > best) {
        best = p;
        best_y = y;
      }
    }
    predictor.decision[static_cast<std::size_t>(z)] = best_y;
    kept[static_cast<std::size_t>(z)] = best;
  }
  const double risk = std::clamp(1.0 - stable_sum(kept), 0.0, 1.0);
  return {std::move(predictor), risk};
}

InformationReport evaluate_encoder(const JointDistribution& joint_ysx,
                                   const Encoder& encoder) {
  if (joint_ysx.axis_count() != 3) {
    throw UsageError("evaluate_encoder expects a (labels, sites, observations) joint");
  }
  const JointDistribution full =
      push_through_channel(joint_ysx, kObservationAxis, encoder.channel, ChannelMode::Append);

  InformationReport report;
  const int y_group[] = {kLabelAxis};
  const int s_group[] = {kSiteAxis};
  const int x_group[] = {kObservationAxis};
  const int z_group[] = {kRepresentationAxis};

  report.i_y_z = mutual_information(full, y_group, z_group);
  report.i_z_s = mutual_information(full, z_group, s_group);
  report.i_s_y = mutual_information(full, s_group, y_group);

  const ConditionalInformation site_yz =
      conditional_mutual_information(full, y_group, z_group, kSiteAxis);
  const ConditionalInformation site_yx =
      conditional_mutual_information(joint_ysx, y_group, x_group, kSiteAxis);
  report.per_site_i_y_z = site_yz.per_value;
  report.per_site_i_y_x = site_yx.per_value;
  report.skipped_sites = site_yz.skipped_values;

  const int yz_keep[] = {kLabelAxis, kRepresentationAxis};
  const JointDistribution joint_yz = marginalize(full, yz_keep);
  auto [predictor, risk] = bayes_predictor(joint_yz);
  report.risk = risk;

  // Route z through the decision rule to get (labels, sites, z, yhat).
  const Channel decision_channel = Channel::deterministic(
      encoder.z_alphabet(), Alphabet::indexed("yhat", joint_ysx.axis(kLabelAxis).size()),
      predictor.decision);
  const int ysz_keep[] = {kLabelAxis, kSiteAxis, kRepresentationAxis};
  const JointDistribution with_prediction = push_through_channel(
      marginalize(full, ysz_keep), 2, decision_channel, ChannelMode::Append);

  const int pred_y_group[] = {0};
  const int pred_s_group[] = {1};
  const int pred_yhat_group[] = {3};
  report.i_y_yhat = mutual_information(with_prediction, pred_y_group, pred_yhat_group);
  report.i_yhat_s = mutual_information(with_prediction, pred_yhat_group, pred_s_group);
  report.predictor = std::move(predictor);

  const int s_yhat_keep[] = {1, 3};
  const JointDistribution s_yhat = marginalize(with_prediction, s_yhat_keep);
  const int yhat_size = s_yhat.axis(1).size();
  for (int s = 0; s < s_yhat.axis(0).size(); ++s) {
    double site_mass = 0.0;
    for (int v = 0; v < yhat_size; ++v) {
      site_mass += s_yhat.mass()[static_cast<std::size_t>(s) *
                                     static_cast<std::size_t>(yhat_size) +
                                 static_cast<std::size_t>(v)];
    }
    if (site_mass == 0.0) continue;
    std::vector<double> rates(static_cast<std::size_t>(yhat_size), 0.0);
    for (int v = 0; v < yhat_size; ++v) {
      rates[static_cast<std::size_t>(v)] =
          s_yhat.mass()[static_cast<std::size_t>(s) * static_cast<std::size_t>(yhat_size) +
                        static_cast<std::size_t>(v)] /
          site_mass;
    }
    report.prediction_rates.emplace_back(s, std::move(rates));
  }

  // Both inequalities hold by construction; a violation means a defect.
  if (report.i_y_yhat > report.i_y_z + 1e-9) {
    throw NumericalError("I(y,yhat) exceeded I(y,z) beyond tolerance");
  }
  if (report.i_yhat_s > report.i_z_s + 1e-9) {
    throw NumericalError("I(yhat,s) exceeded I(z,s) beyond tolerance");
  }
  return report;
}

EnumerationResult enumerate_deterministic_optimum(const JointDistribution& joint_ysx,
                                                  int z_size,
                                                  double invariance_tolerance) {
  if (joint_ysx.axis_count() != 3) {
    throw UsageError("enumerate_deterministic_optimum expects a 3-axis scenario joint");
  }
  if (z_size < 1) throw UsageError("z_size must be >= 1");

  const int y_size = joint_ysx.axis(kLabelAxis).size();
  const int s_size = joint_ysx.axis(kSiteAxis).size();
  const int x_size = joint_ysx.axis(kObservationAxis).size();

  std::uint64_t total_maps = 1;
  for (int i = 0; i < x_size; ++i) {
    if (total_maps > kEnumerationCap / static_cast<std::uint64_t>(z_size)) {
      throw CapacityError("deterministic enumeration needs z_size^|X| <= " +
                          std::to_string(kEnumerationCap) + " maps");
    }
    total_maps *= static_cast<std::uint64_t>(z_size);
  }

  const int yx_keep[] = {kLabelAxis, kObservationAxis};
  const int sx_keep[] = {kSiteAxis, kObservationAxis};
  const JointDistribution p_yx = marginalize(joint_ysx, yx_keep);
  const JointDistribution p_sx = marginalize(joint_ysx, sx_keep);

  std::vector<int> map(static_cast<std::size_t>(x_size), 0);
  std::vector<double> p_yz(static_cast<std::size_t>(y_size) * static_cast<std::size_t>(z_size));
  std::vector<double> p_sz(static_cast<std::size_t>(s_size) * static_cast<std::size_t>(z_size));

  EnumerationResult result;
  bool have_best = false;
  double best_i_y_z = -1.0;
  double best_i_z_s = 0.0;

  for (std::uint64_t m = 0; m < total_maps; ++m) {
    std::fill(p_yz.begin(), p_yz.end(), 0.0);
    std::fill(p_sz.begin(), p_sz.end(), 0.0);
    for (int x = 0; x < x_size; ++x) {
      const int z = map[static_cast<std::size_t>(x)];
      for (int y = 0; y < y_size; ++y) {
        p_yz[static_cast<std::size_t>(y) * static_cast<std::size_t>(z_size) +
             static_cast<std::size_t>(z)] +=
            p_yx.mass()[static_cast<std::size_t>(y) * static_cast<std::size_t>(x_size) +
                        static_cast<std::size_t>(x)];
      }
      for (int s = 0; s < s_size; ++s) {
        p_sz[static_cast<std::size_t>(s) * static_cast<std::size_t>(z_size) +
             static_cast<std::size_t>(z)] +=
            p_sx.mass()[static_cast<std::size_t>(s) * static_cast<std::size_t>(x_size) +
                        static_cast<std::size_t>(x)];
      }
    }
    const double i_z_s = information_from_table(p_sz, s_size, z_size);
    if (i_z_s <= invariance_tolerance) {
      ++result.feasible_count;
      const double i_y_z = information_from_table(p_yz, y_size, z_size);
      // lexicographic iteration order settles exact ties
      if (!have_best || i_y_z > best_i_y_z ||
          (i_y_z == best_i_y_z && i_z_s < best_i_z_s)) {
        have_best = true;
        best_i_y_z = i_y_z;
        best_i_z_s = i_z_s;
        result.map = map;
      }
    }
    for (int x = x_size - 1; x >= 0; --x) {
      auto& digit = map[static_cast<std::size_t>(x)];
      if (++digit < z_size) break;
      digit = 0;
    }
  }
  result.maps_scored = total_maps;
  // the constant map is always feasible, so a best map must exist
  if (!have_best) {
    throw NumericalError("no feasible deterministic map found; constant map should qualify");
  }
  result.encoder = deterministic_encoder(joint_ysx.axis(kObservationAxis), result.map, z_size);
  result.report = evaluate_encoder(joint_ysx, result.encoder);
  return result;
}

std::string to_string(Prop1Verdict verdict) {
  switch (verdict) {
    case Prop1Verdict::Holds: return "holds";
    case Prop1Verdict::Violated: return "violated";
    case Prop1Verdict::HypothesisNotMet: return "hypothesis-not-met";
  }
  return "unknown";
}

Prop1Report check_prop1(const JointDistribution& joint_ysx, const Encoder& encoder,
                        Prop1Tolerances tolerances) {
  const InformationReport info = evaluate_encoder(joint_ysx, encoder);
  const SiteInformationProfile profile = per_site_information(joint_ysx);

  Prop1Report report;
  report.lhs = info.i_y_z;
  report.rhs = profile.minimum_value;
  report.rhs_site = profile.minimum_site;
  report.slack = report.rhs - report.lhs;
  report.hypothesis_i_s_y = info.i_s_y;
  report.hypothesis_i_z_s = info.i_z_s;
  report.hypothesis_satisfied = info.i_s_y <= tolerances.hypothesis &&
                                info.i_z_s <= tolerances.hypothesis;
  report.per_site_i_y_z = info.per_site_i_y_z;
  report.identity_deviation = 0.0;
  for (const auto& [site, bits] : info.per_site_i_y_z) {
    report.identity_deviation = std::max(report.identity_deviation,
                                         std::abs(bits - info.i_y_z));
  }
  if (!report.hypothesis_satisfied) {
    report.verdict = Prop1Verdict::HypothesisNotMet;
  } else if (report.slack < -tolerances.slack) {
    report.verdict = Prop1Verdict::Violated;
  } else {
    report.verdict = Prop1Verdict::Holds;
  }
  return report;
}

Prop2Report check_prop2(const JointDistribution& joint_ysx, const Encoder& encoder,
                        int exclusive_label, int home_site) {
  if (joint_ysx.axis_count() != 3) {
    throw UsageError("check_prop2 expects a (labels, sites, observations) joint");
  }
  const auto label_map = site_exclusive_labels(joint_ysx);
  if (exclusive_label < 0 || exclusive_label >= static_cast<int>(label_map.size())) {
    throw UsageError("exclusive label index out of range");
  }
  if (home_site < 0 || home_site >= joint_ysx.axis(kSiteAxis).size()) {
    throw UsageError("home site index out of range");
  }
  const LabelSites& entry = label_map[static_cast<std::size_t>(exclusive_label)];
  if (entry.degenerate) {
    throw UsageError("label '" +
                     joint_ysx.axis(kLabelAxis).labels[static_cast<std::size_t>(exclusive_label)] +
                     "' has zero total mass");
  }
  if (entry.sites != std::vector<int>{home_site}) {
    throw UsageError("label '" +
                     joint_ysx.axis(kLabelAxis).labels[static_cast<std::size_t>(exclusive_label)] +
                     "' is not exclusive to site '" +
                     joint_ysx.axis(kSiteAxis).labels[static_cast<std::size_t>(home_site)] + "'");
  }

  const InformationReport info = evaluate_encoder(joint_ysx, encoder);

  Prop2Report report;
  report.exclusive_label = exclusive_label;
  report.home_site = home_site;
  report.i_z_s = info.i_z_s;

  for (const auto& [site, rates] : info.prediction_rates) {
    report.rate_by_site.emplace_back(site, rates[static_cast<std::size_t>(exclusive_label)]);
  }
  for (std::size_t i = 0; i < report.rate_by_site.size(); ++i) {
    for (std::size_t j = i + 1; j < report.rate_by_site.size(); ++j) {
      report.rate_gap = std::max(report.rate_gap, std::abs(report.rate_by_site[i].second -
                                                           report.rate_by_site[j].second));
    }
  }

  // recall needs p(yhat = y' | y = y', s = home): walk (y,s,x,z) mass directly
  const JointDistribution full =
      push_through_channel(joint_ysx, kObservationAxis, encoder.channel, ChannelMode::Append);
  const int x_size = joint_ysx.axis(kObservationAxis).size();
  const int z_size = encoder.z_alphabet().size();
  double hit = 0.0;
  double total = 0.0;
  for (int x = 0; x < x_size; ++x) {
    for (int z = 0; z < z_size; ++z) {
      const int idx[] = {exclusive_label, home_site, x, z};
      const double p = full.at(idx);
      total += p;
      if (info.predictor.decision[static_cast<std::size_t>(z)] == exclusive_label) hit += p;
    }
  }
  report.recall_at_home = total > 0.0 ? hit / total : 0.0;

  // false positives pooled over every other site
  const int s_keep[] = {kSiteAxis};
  const JointDistribution p_s = marginalize(joint_ysx, s_keep);
  double elsewhere_mass = 0.0;
  double elsewhere_hits = 0.0;
  for (const auto& [site, rates] : info.prediction_rates) {
    if (site == home_site) continue;
    const double mass = p_s.mass()[static_cast<std::size_t>(site)];
    elsewhere_mass += mass;
    elsewhere_hits += mass * rates[static_cast<std::size_t>(exclusive_label)];
  }
  report.false_positive_rate_elsewhere =
      elsewhere_mass > 0.0 ? elsewhere_hits / elsewhere_mass : 0.0;
  return report;
}

std::string to_string(ScannerFamily family) {
  switch (family) {
    case ScannerFamily::Identical: return "identical";
    case ScannerFamily::IndependentRandom: return "independent-random";
    case ScannerFamily::FreeRandom: return "free-random";
  }
  return "unknown";
}

Scenario two_site_bsc_scenario(double crossover_a, double crossover_b) {
  Scenario scenario;
  scenario.label_alphabet = Alphabet::indexed("y", 2);
  scenario.site_alphabet = Alphabet("s", {"A", "B"});
  scenario.observation_alphabet = Alphabet::indexed("x", 2);
  scenario.coupling = IndependentCoupling{{0.5, 0.5}, {0.5, 0.5}};
  scenario.scanners = {ScannerModel{0, BscScanner{crossover_a}},
                       ScannerModel{1, BscScanner{crossover_b}}};
  return scenario;
}

Scenario site_exclusive_scenario() {
  Scenario scenario;
  scenario.label_alphabet = Alphabet::indexed("y", 3);
  scenario.site_alphabet = Alphabet("s", {"A", "B"});
  scenario.observation_alphabet = Alphabet::indexed("x", 3);
  const double a = 1.0 / 4.0;  // p(s=A) * p(y|A) entries
  const double b = 1.0 / 6.0;  // p(s=B) * p(y|B) entries
  scenario.coupling = JointCoupling{{a, b, a, b, 0.0, b}};
  std::vector<int> identity_map = {0, 1, 2};
  const Channel identity = Channel::deterministic(scenario.label_alphabet,
                                                  scenario.observation_alphabet, identity_map);
  scenario.scanners = {ScannerModel{0, ExplicitScanner{identity}},
                       ScannerModel{1, ExplicitScanner{identity}}};
  return scenario;
}

Scenario identical_scanner_scenario(std::uint64_t seed, ScenarioSizes sizes,
                                    double concentration) {
  Scenario scenario = random_scenario(seed, sizes, /*independent=*/true, concentration);
  for (int site = 1; site < sizes.sites; ++site) {
    scenario.scanners[static_cast<std::size_t>(site)].model =
        scenario.scanners[0].model;
  }
  return scenario;
}

SearchCatalog counterexample_search(const SearchConfig& config) {
  if (config.instances < 0) throw UsageError("instance count must be nonnegative");
  SearchCatalog catalog;
  catalog.config = config;

  const Prop1Tolerances tolerances{std::max(1e-9, config.invariance_tolerance),
                                   config.slack_margin};
  for (int instance = 0; instance < config.instances; ++instance) {
    Scenario scenario;
    const std::uint64_t instance_seed = mix_seed(config.seed, static_cast<std::uint64_t>(instance));
    switch (config.scanner_family) {
      case ScannerFamily::Identical:
        scenario = identical_scanner_scenario(instance_seed, config.sizes,
                                              config.concentration);
        break;
      case ScannerFamily::IndependentRandom:
        scenario = random_scenario(instance_seed, config.sizes, /*independent=*/true,
                                   config.concentration);
        break;
      case ScannerFamily::FreeRandom: {
        if (instance == 0) {
          // fixed probe: mismatched-noise scanners with an exactly invariant
          // identity representation; always recorded when it trips
          scenario = two_site_bsc_scenario(0.1, 0.4);
        } else {
          Rng spread(mix_seed(config.seed, 0xF00Du + static_cast<std::uint64_t>(instance)));
          const double factor = std::exp((spread.uniform() - 0.5) * std::log(100.0));
          scenario = random_scenario(instance_seed, config.sizes, /*independent=*/true,
                                     config.concentration * factor);
        }
        break;
      }
    }
    const JointDistribution joint = build_joint(scenario);
    const int z_size = config.z_size > 0
                           ? config.z_size
                           : joint.axis(kObservationAxis).size();
    const EnumerationResult best =
        enumerate_deterministic_optimum(joint, z_size, config.invariance_tolerance);
    const Prop1Report report = check_prop1(joint, best.encoder, tolerances);
    if (report.verdict != Prop1Verdict::Holds) {
      catalog.entries.push_back(SearchEntry{instance, report, std::move(scenario), best.map});
    }
    ++catalog.instances_run;
  }
  return catalog;
}

}  // namespace invarlab
