#include "invarlab/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "invarlab/rng.hpp"

namespace invarlab {

namespace {

void check_prior(const std::vector<double>& prior, const Alphabet& alphabet,
                 const char* what) {
  if (static_cast<int>(prior.size()) != alphabet.size()) {
    throw ValidationError(std::string(what) + " has " + std::to_string(prior.size()) +
                          " entries but alphabet '" + alphabet.name + "' has " +
                          std::to_string(alphabet.size()));
  }
  for (double v : prior) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError(std::string(what) + " has a negative or non-finite entry");
    }
  }
  const double total = stable_sum(prior);
  if (std::abs(total - 1.0) > kRawMassTolerance) {
    throw ValidationError(std::string(what) + " sums to " + std::to_string(total) +
                          ", further than 1e-6 from 1");
  }
}

}  // namespace

int ScannerModel::min_observation_size(int label_count) const {
  if (std::holds_alternative<BscScanner>(model)) return 2;
  if (std::holds_alternative<ErasureScanner>(model)) return label_count + 1;
  return std::get<ExplicitScanner>(model).rows.output().size();
}

Channel ScannerModel::to_channel(const Alphabet& labels, const Alphabet& observations) const {
  const auto x_size = static_cast<std::size_t>(observations.size());
  if (const auto* bsc = std::get_if<BscScanner>(&model)) {
    if (labels.size() != 2) {
      throw ValidationError("bsc scanner at site " + std::to_string(site) +
                            " needs exactly 2 labels");
    }
    return Channel::binary_symmetric(labels, observations, bsc->crossover);
  }
  if (const auto* erasure = std::get_if<ErasureScanner>(&model)) {
    if (!(erasure->erase_prob >= 0.0 && erasure->erase_prob <= 1.0)) {
      throw ValidationError("erasure probability must lie in [0,1]");
    }
    if (observations.size() < labels.size() + 1) {
      throw ValidationError("erasure scanner at site " + std::to_string(site) +
                            " needs an erased symbol beyond the label alphabet");
    }
    const auto y_size = static_cast<std::size_t>(labels.size());
    std::vector<double> rows(y_size * x_size, 0.0);
    for (std::size_t y = 0; y < y_size; ++y) {
      rows[y * x_size + y] = 1.0 - erasure->erase_prob;
      rows[y * x_size + x_size - 1] = erasure->erase_prob;
    }
    return Channel(labels, observations, std::move(rows));
  }
  const Channel& given = std::get<ExplicitScanner>(model).rows;
  if (given.input().size() != labels.size()) {
    throw ValidationError("explicit scanner at site " + std::to_string(site) + " has " +
                          std::to_string(given.input().size()) + " rows but there are " +
                          std::to_string(labels.size()) + " labels");
  }
  if (given.output().size() > observations.size()) {
    throw ValidationError("explicit scanner at site " + std::to_string(site) +
                          " emits outside the observation alphabet");
  }
  if (given.output().size() == observations.size()) {
    return Channel(labels, observations, std::vector<double>(given.rows().begin(),
                                                             given.rows().end()));
  }
  // zero-pad to the shared observation alphabet
  const auto y_size = static_cast<std::size_t>(labels.size());
  const auto given_x = static_cast<std::size_t>(given.output().size());
  std::vector<double> rows(y_size * x_size, 0.0);
  for (std::size_t y = 0; y < y_size; ++y) {
    for (std::size_t x = 0; x < given_x; ++x) rows[y * x_size + x] = given(static_cast<int>(y), static_cast<int>(x));
  }
  return Channel(labels, observations, std::move(rows));
}

JointDistribution Scenario::coupling_joint() const {
  if (const auto* ind = std::get_if<IndependentCoupling>(&coupling)) {
    check_prior(ind->label_prior, label_alphabet, "label prior");
    check_prior(ind->site_prior, site_alphabet, "site prior");
    const auto s_size = static_cast<std::size_t>(site_alphabet.size());
    std::vector<double> mass(ind->label_prior.size() * s_size);
    for (std::size_t y = 0; y < ind->label_prior.size(); ++y) {
      for (std::size_t s = 0; s < s_size; ++s) {
        mass[y * s_size + s] = ind->label_prior[y] * ind->site_prior[s];
      }
    }
    return JointDistribution({label_alphabet, site_alphabet}, std::move(mass));
  }
  const auto& joint = std::get<JointCoupling>(coupling).joint_ys;
  return JointDistribution({label_alphabet, site_alphabet}, joint);
}

void Scenario::validate() const {
  if (static_cast<int>(scanners.size()) != site_alphabet.size()) {
    throw ValidationError("scenario declares " + std::to_string(scanners.size()) +
                          " scanners for " + std::to_string(site_alphabet.size()) + " sites");
  }
  std::vector<bool> seen(static_cast<std::size_t>(site_alphabet.size()), false);
  for (const auto& scanner : scanners) {
    if (scanner.site < 0 || scanner.site >= site_alphabet.size()) {
      throw ValidationError("scanner declared for unknown site index " +
                            std::to_string(scanner.site));
    }
    if (seen[static_cast<std::size_t>(scanner.site)]) {
      throw ValidationError("site '" + site_alphabet.labels[static_cast<std::size_t>(scanner.site)] +
                            "' has more than one scanner");
    }
    seen[static_cast<std::size_t>(scanner.site)] = true;
    if (scanner.min_observation_size(label_alphabet.size()) > observation_alphabet.size()) {
      throw ValidationError("observation alphabet is too small for the scanner at site '" +
                            site_alphabet.labels[static_cast<std::size_t>(scanner.site)] + "'");
    }
    if (const auto* bsc = std::get_if<BscScanner>(&scanner.model)) {
      if (!(bsc->crossover >= 0.0 && bsc->crossover <= 1.0)) {
        throw ValidationError("bsc crossover must lie in [0,1]");
      }
    }
  }
  coupling_joint();  // validates priors / the joint table
}

JointDistribution build_joint(const Scenario& scenario) {
  scenario.validate();
  const JointDistribution ys = scenario.coupling_joint();

  std::vector<Channel> channels;
  channels.reserve(scenario.scanners.size());
  std::vector<const Channel*> by_site(static_cast<std::size_t>(scenario.site_alphabet.size()),
                                      nullptr);
  for (const auto& scanner : scenario.scanners) {
    channels.push_back(scanner.to_channel(scenario.label_alphabet,
                                          scenario.observation_alphabet));
  }
  for (std::size_t i = 0; i < scenario.scanners.size(); ++i) {
    by_site[static_cast<std::size_t>(scenario.scanners[i].site)] = &channels[i];
  }

  const auto y_size = static_cast<std::size_t>(scenario.label_alphabet.size());
  const auto s_size = static_cast<std::size_t>(scenario.site_alphabet.size());
  const auto x_size = static_cast<std::size_t>(scenario.observation_alphabet.size());
  std::vector<double> mass(y_size * s_size * x_size, 0.0);
  for (std::size_t y = 0; y < y_size; ++y) {
    for (std::size_t s = 0; s < s_size; ++s) {
      const double p_ys = ys.mass()[y * s_size + s];
      if (p_ys == 0.0) continue;
      const Channel& channel = *by_site[s];
      for (std::size_t x = 0; x < x_size; ++x) {
        mass[(y * s_size + s) * x_size + x] =
            p_ys * channel(static_cast<int>(y), static_cast<int>(x));
      }
    }
  }
  return JointDistribution({scenario.label_alphabet, scenario.site_alphabet,
                            scenario.observation_alphabet},
                           std::move(mass));
}

SiteInformationProfile per_site_information(const JointDistribution& joint) {
  if (joint.axis_count() != 3) {
    throw UsageError("per_site_information expects a (labels, sites, observations) joint");
  }
  const int label_group[] = {kLabelAxis};
  const int observation_group[] = {kObservationAxis};
  const ConditionalInformation by_site =
      conditional_mutual_information(joint, label_group, observation_group, kSiteAxis);

  SiteInformationProfile profile;
  profile.per_site = by_site.per_value;
  profile.skipped_sites = by_site.skipped_values;
  if (profile.per_site.empty()) {
    throw UsageError("per_site_information needs at least one positive-mass site");
  }
  profile.minimum_site = profile.per_site.front().first;
  profile.minimum_value = profile.per_site.front().second;
  for (const auto& [site, bits] : profile.per_site) {
    if (bits < profile.minimum_value) {
      profile.minimum_value = bits;
      profile.minimum_site = site;
    }
  }
  profile.unconditional = mutual_information(joint, label_group, observation_group);
  return profile;
}

Scenario random_scenario(std::uint64_t seed, ScenarioSizes sizes, bool independent,
                         double concentration) {
  if (sizes.labels < 1 || sizes.sites < 1 || sizes.observations < 1) {
    throw UsageError("random_scenario sizes must all be >= 1");
  }
  Rng rng(seed);
  Scenario scenario;
  scenario.label_alphabet = Alphabet::indexed("y", sizes.labels);
  scenario.site_alphabet = Alphabet::indexed("s", sizes.sites);
  scenario.observation_alphabet = Alphabet::indexed("x", sizes.observations);

  if (independent) {
    IndependentCoupling coupling;
    coupling.label_prior = rng.dirichlet(static_cast<std::size_t>(sizes.labels), concentration);
    coupling.site_prior = rng.dirichlet(static_cast<std::size_t>(sizes.sites), concentration);
    scenario.coupling = std::move(coupling);
  } else {
    JointCoupling coupling;
    coupling.joint_ys = rng.dirichlet(
        static_cast<std::size_t>(sizes.labels) * static_cast<std::size_t>(sizes.sites),
        concentration);
    scenario.coupling = std::move(coupling);
  }

  for (int site = 0; site < sizes.sites; ++site) {
    std::vector<double> rows;
    rows.reserve(static_cast<std::size_t>(sizes.labels) *
                 static_cast<std::size_t>(sizes.observations));
    for (int y = 0; y < sizes.labels; ++y) {
      const auto row = rng.dirichlet(static_cast<std::size_t>(sizes.observations), concentration);
      rows.insert(rows.end(), row.begin(), row.end());
    }
    scenario.scanners.push_back(ScannerModel{
        site, ExplicitScanner{Channel(scenario.label_alphabet, scenario.observation_alphabet,
                                      std::move(rows))}});
  }
  return scenario;
}

std::vector<LabelSites> site_exclusive_labels(const JointDistribution& joint) {
  if (joint.axis_count() < 2) {
    throw UsageError("site_exclusive_labels needs label and site axes");
  }
  const int keep[] = {kLabelAxis, kSiteAxis};
  const JointDistribution ys = marginalize(joint, keep);
  const auto s_size = static_cast<std::size_t>(ys.axis(1).size());

  std::vector<LabelSites> result;
  for (int label = 0; label < ys.axis(0).size(); ++label) {
    LabelSites entry;
    entry.label = label;
    for (std::size_t s = 0; s < s_size; ++s) {
      if (ys.mass()[static_cast<std::size_t>(label) * s_size + s] > 0.0) {
        entry.sites.push_back(static_cast<int>(s));
      }
    }
    entry.exclusive = entry.sites.size() == 1;
    entry.degenerate = entry.sites.empty();
    result.push_back(std::move(entry));
  }
  return result;
}

}  // namespace invarlab
