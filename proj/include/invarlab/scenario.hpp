#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "invarlab/prob.hpp"

namespace invarlab {

// Axis order of every scenario joint built here: (labels, sites, observations),
// with the representation appended as axis 3 once an encoder is applied.
inline constexpr int kLabelAxis = 0;
inline constexpr int kSiteAxis = 1;
inline constexpr int kObservationAxis = 2;
inline constexpr int kRepresentationAxis = 3;

/// Binary symmetric scanner with the given crossover probability.
struct BscScanner {
  double crossover = 0.0;
  bool operator==(const BscScanner&) const = default;
};

/// Erasure scanner: passes the label with probability 1-erase_prob and
/// otherwise emits the dedicated erased symbol (last observation index).
struct ErasureScanner {
  double erase_prob = 0.0;
  bool operator==(const ErasureScanner&) const = default;
};

/// Fully general scanner given by an explicit label -> observation channel.
struct ExplicitScanner {
  Channel rows;
  bool operator==(const ExplicitScanner&) const = default;
};

/// One site's observation model p(x | y, s = site).
struct ScannerModel {
  int site = 0;
  std::variant<BscScanner, ErasureScanner, ExplicitScanner> model;

  /// Smallest observation alphabet this scanner can emit into.
  int min_observation_size(int label_count) const;

  /// Materialize the label -> observation channel, zero-padding rows when
  /// the observation alphabet is wider than this scanner needs.
  Channel to_channel(const Alphabet& labels, const Alphabet& observations) const;

  bool operator==(const ScannerModel&) const = default;
};

/// Labels and sites drawn independently from separate priors.
struct IndependentCoupling {
  std::vector<double> label_prior;
  std::vector<double> site_prior;
  bool operator==(const IndependentCoupling&) const = default;
};

/// Full p(y,s) table, row-major over (label, site). Zero cells declare
/// labels that never occur at a site.
struct JointCoupling {
  std::vector<double> joint_ys;
  bool operator==(const JointCoupling&) const = default;
};

/// A multi-site synthetic world: who the labels and sites are, how they
/// couple, and which scanner observes each site.
struct Scenario {
  Alphabet label_alphabet;
  Alphabet site_alphabet;
  Alphabet observation_alphabet;
  std::variant<IndependentCoupling, JointCoupling> coupling;
  std::vector<ScannerModel> scanners;  // index-aligned with site symbols

  /// p(y,s) over (label_alphabet, site_alphabet).
  JointDistribution coupling_joint() const;

  /// Structural checks beyond what the field types enforce.
  void validate() const;

  bool operator==(const Scenario&) const = default;
};

/// Materialize p(y,s,x) = p(y,s) p(x|y,s) over (labels, sites, observations).
JointDistribution build_joint(const Scenario& scenario);

/// Per-site label information and its minimum over sites.
struct SiteInformationProfile {
  std::vector<std::pair<int, double>> per_site;  // (site, I(y;x|s=site) bits)
  int minimum_site = 0;
  double minimum_value = 0.0;
  double unconditional = 0.0;  // I(y;x) bits
  std::vector<int> skipped_sites;  // zero-mass sites, never reported as 0 bits
};

/// Compute each site's I(y;x|s=s') from a (labels, sites, observations) joint.
SiteInformationProfile per_site_information(const JointDistribution& joint);

struct ScenarioSizes {
  int labels = 2;
  int sites = 2;
  int observations = 2;
};

/// Deterministic random scenario: Dirichlet priors and explicit Dirichlet
/// scanner rows, coupling form selected by `independent`.
Scenario random_scenario(std::uint64_t seed, ScenarioSizes sizes, bool independent,
                         double concentration = 1.0);

/// Which sites each label occurs at, from the (y,s) marginal.
struct LabelSites {
  int label = 0;
  std::vector<int> sites;  // sites with p(label, site) > 0
  bool exclusive = false;  // exactly one site
  bool degenerate = false; // zero total mass
};

std::vector<LabelSites> site_exclusive_labels(const JointDistribution& joint);

}  // namespace invarlab
