#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "invarlab/errors.hpp"

namespace invarlab {

/// Hard cap on dense tensor size; exceeding it raises CapacityError.
inline constexpr std::size_t kMaxTensorCells = 10'000'000;

/// Maximum deviation of a user-supplied mass vector from unit total.
inline constexpr double kRawMassTolerance = 1e-6;

/// Totals already this close to 1 are kept as-is, which makes
/// renormalization idempotent and round-trips bit-exact.
inline constexpr double kNormalizationSkipTolerance = 1e-13;

/// Validate a raw mass total and renormalize `values` in place unless the
/// total is already within the skip tolerance of 1. `what` names the
/// entity in error messages.
void normalize_mass(std::span<double> values, const std::string& what);

/// Mutual information below this is a numerical fault, not round-off.
inline constexpr double kNegativeInformationTolerance = 1e-10;

/// A finite set of symbols. Labels default to "0".."n-1".
struct Alphabet {
  std::string name;
  std::vector<std::string> labels;

  Alphabet() = default;
  Alphabet(std::string name, std::vector<std::string> labels);

  /// Alphabet of `size` symbols labelled by their indices.
  static Alphabet indexed(std::string name, int size);

  int size() const { return static_cast<int>(labels.size()); }
  bool operator==(const Alphabet&) const = default;
};

/// Compensated (Neumaier) summation; keeps totals exact to ~1 ulp.
double stable_sum(std::span<const double> values);

/// An exact joint probability tensor over an ordered set of alphabets.
///
/// Mass is stored dense and row-major with the last axis fastest. The
/// constructor validates nonnegativity, rejects totals further than 1e-6
/// from 1, and renormalizes so the stored mass sums to 1 within 1e-12.
/// Instances are immutable after construction.
class JointDistribution {
 public:
  JointDistribution(std::vector<Alphabet> axes, std::vector<double> mass);

  const std::vector<Alphabet>& axes() const { return axes_; }
  const Alphabet& axis(int i) const { return axes_.at(static_cast<std::size_t>(i)); }
  int axis_count() const { return static_cast<int>(axes_.size()); }
  std::span<const double> mass() const { return mass_; }
  std::size_t cell_count() const { return mass_.size(); }

  std::size_t offset(std::span<const int> index) const;
  double at(std::span<const int> index) const { return mass_[offset(index)]; }
  std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

  /// Index of the axis with the given name, or -1.
  int find_axis(std::string_view name) const;

 private:
  std::vector<Alphabet> axes_;
  std::vector<double> mass_;
  std::vector<std::size_t> strides_;
};

/// A row-stochastic conditional distribution p(out | in).
class Channel {
 public:
  /// Trivial 1x1 channel; placeholder for default-constructed holders.
  Channel();

  /// `rows` is row-major, |input| x |output|; each row must sum to 1
  /// within 1e-6 (renormalized to 1e-12 on construction).
  Channel(Alphabet input, Alphabet output, std::vector<double> rows);

  static Channel identity(const Alphabet& alphabet);
  /// All rows put full mass on `target`.
  static Channel constant(const Alphabet& input, const Alphabet& output, int target = 0);
  /// Deterministic map in -> out given as one output symbol per input.
  static Channel deterministic(const Alphabet& input, const Alphabet& output,
                               std::span<const int> map);
  /// Binary symmetric channel with the given crossover probability.
  static Channel binary_symmetric(const Alphabet& input, const Alphabet& output,
                                  double crossover);

  const Alphabet& input() const { return input_; }
  const Alphabet& output() const { return output_; }
  double operator()(int in, int out) const {
    return rows_[static_cast<std::size_t>(in) * static_cast<std::size_t>(output_.size()) +
                 static_cast<std::size_t>(out)];
  }
  std::span<const double> row(int in) const;
  std::span<const double> rows() const { return rows_; }

  bool operator==(const Channel&) const = default;

 private:
  Alphabet input_;
  Alphabet output_;
  std::vector<double> rows_;
};

/// Shannon entropy of the tensor in bits, with 0 log 0 := 0.
double entropy(const JointDistribution& dist);

/// Binary entropy h2(p) in bits; h2(0) = h2(1) = 0.
double binary_entropy(double p);

/// Sum out every axis not listed in `keep`; result axes follow the order
/// of `keep`, so this doubles as an axis permutation.
JointDistribution marginalize(const JointDistribution& joint, std::span<const int> keep);

/// Renormalized slice joint[..., axis = value, ...] over the remaining axes.
/// Raises UnsupportedConditionError when the slice carries zero mass.
JointDistribution condition(const JointDistribution& joint, int axis, int value);

/// I(A;B) in bits between two disjoint groups of axes.
double mutual_information(const JointDistribution& joint, std::span<const int> group_a,
                          std::span<const int> group_b);

/// Result of conditional_mutual_information: the prior-weighted total plus
/// the per-value table; zero-mass conditioning values are skipped and listed.
struct ConditionalInformation {
  double bits = 0.0;
  std::vector<std::pair<int, double>> per_value;
  std::vector<int> skipped_values;
};

/// I(A;B | C) where C is a single conditioning axis.
ConditionalInformation conditional_mutual_information(const JointDistribution& joint,
                                                      std::span<const int> group_a,
                                                      std::span<const int> group_b,
                                                      int conditioning_axis);

enum class ChannelMode {
  Replace,  ///< the pushed axis is replaced by the channel output
  Append,   ///< the channel output is appended as a new final axis
};

/// Push one axis of the joint through a channel, realizing x -> z so that
/// the appended axis is conditionally independent of the rest given x.
JointDistribution push_through_channel(const JointDistribution& joint, int axis,
                                       const Channel& channel, ChannelMode mode);

}  // namespace invarlab
