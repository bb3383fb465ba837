#include "invarlab/prob.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace invarlab {

namespace {

std::string join_indices(std::span<const int> idx) {
  std::ostringstream os;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) os << ',';
    os << idx[i];
  }
  return os.str();
}

void check_axis_range(const JointDistribution& joint, std::span<const int> group,
                      const char* what) {
  if (group.empty()) throw UsageError(std::string(what) + ": axis group is empty");
  for (int a : group) {
    if (a < 0 || a >= joint.axis_count()) {
      throw UsageError(std::string(what) + ": axis index " + std::to_string(a) +
                       " out of range");
    }
  }
}

void check_disjoint(std::span<const int> group_a, std::span<const int> group_b,
                    const char* what) {
  for (int a : group_a) {
    for (int b : group_b) {
      if (a == b) {
        throw UsageError(std::string(what) + ": axis groups overlap at axis " +
                         std::to_string(a));
      }
    }
  }
}

double log2_ratio(double num, double den) {
  if (den <= 0.0) {
    if (num > 0.0) {
      throw NumericalError("positive mass over a zero-mass marginal");
    }
    return 0.0;
  }
  return std::log2(num / den);
}

}  // namespace

Alphabet::Alphabet(std::string name_, std::vector<std::string> labels_) {
  if (labels_.empty()) throw ValidationError("alphabet '" + name_ + "' must have size >= 1");
  std::unordered_set<std::string_view> seen;
  for (const auto& label : labels_) {
    if (!seen.insert(label).second) {
      throw ValidationError("alphabet '" + name_ + "' has duplicate label '" + label + "'");
    }
  }
  name = std::move(name_);
  labels = std::move(labels_);
}

Alphabet Alphabet::indexed(std::string name, int size) {
  if (size < 1) throw ValidationError("alphabet '" + name + "' must have size >= 1");
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) labels.push_back(std::to_string(i));
  return Alphabet(std::move(name), std::move(labels));
}

double stable_sum(std::span<const double> values) {
  double sum = 0.0;
  double compensation = 0.0;
  for (double v : values) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      compensation += (sum - t) + v;
    } else {
      compensation += (v - t) + sum;
    }
    sum = t;
  }
  return sum + compensation;
}

void normalize_mass(std::span<double> values, const std::string& what) {
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError(what + " has a negative or non-finite entry");
    }
  }
  const double total = stable_sum(values);
  if (std::abs(total - 1.0) > kRawMassTolerance) {
    throw ValidationError(what + " sums to " + std::to_string(total) +
                          ", further than 1e-6 from 1");
  }
  if (std::abs(total - 1.0) > kNormalizationSkipTolerance) {
    for (double& v : values) v /= total;
  }
}

JointDistribution::JointDistribution(std::vector<Alphabet> axes, std::vector<double> mass)
    : axes_(std::move(axes)), mass_(std::move(mass)) {
  if (axes_.empty()) throw UsageError("joint distribution needs at least one axis");
  std::size_t cells = 1;
  for (const auto& a : axes_) {
    const auto n = static_cast<std::size_t>(a.size());
    if (n == 0) throw ValidationError("axis '" + a.name + "' has no symbols");
    if (cells > kMaxTensorCells / n) {
      throw CapacityError("joint tensor exceeds the " + std::to_string(kMaxTensorCells) +
                          "-cell cap");
    }
    cells *= n;
  }
  if (mass_.size() != cells) {
    throw ValidationError("mass has " + std::to_string(mass_.size()) + " entries, expected " +
                          std::to_string(cells));
  }
  normalize_mass(mass_, "joint mass");

  strides_.assign(axes_.size(), 1);
  for (int i = static_cast<int>(axes_.size()) - 2; i >= 0; --i) {
    strides_[static_cast<std::size_t>(i)] =
        strides_[static_cast<std::size_t>(i + 1)] *
        static_cast<std::size_t>(axes_[static_cast<std::size_t>(i + 1)].size());
  }
}

std::size_t JointDistribution::offset(std::span<const int> index) const {
  if (index.size() != axes_.size()) {
    throw UsageError("index (" + join_indices(index) + ") has wrong rank");
  }
  std::size_t off = 0;
  for (std::size_t i = 0; i < index.size(); ++i) {
    const int v = index[i];
    if (v < 0 || v >= axes_[i].size()) {
      throw UsageError("index (" + join_indices(index) + ") out of range on axis " +
                       std::to_string(i));
    }
    off += strides_[i] * static_cast<std::size_t>(v);
  }
  return off;
}

int JointDistribution::find_axis(std::string_view name) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (axes_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

Channel::Channel() : Channel(Alphabet::indexed("in", 1), Alphabet::indexed("out", 1), {1.0}) {}

Channel::Channel(Alphabet input, Alphabet output, std::vector<double> rows)
    : input_(std::move(input)), output_(std::move(output)), rows_(std::move(rows)) {
  if (input_.size() == 0 || output_.size() == 0) {
    throw ValidationError("channel alphabets must be nonempty");
  }
  const auto in = static_cast<std::size_t>(input_.size());
  const auto out = static_cast<std::size_t>(output_.size());
  if (rows_.size() != in * out) {
    throw ValidationError("channel rows have " + std::to_string(rows_.size()) +
                          " entries, expected " + std::to_string(in * out));
  }
  for (std::size_t r = 0; r < in; ++r) {
    auto row = std::span<double>(rows_).subspan(r * out, out);
    normalize_mass(row, "channel row " + std::to_string(r));
  }
}

Channel Channel::identity(const Alphabet& alphabet) {
  const auto n = static_cast<std::size_t>(alphabet.size());
  std::vector<double> rows(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) rows[i * n + i] = 1.0;
  return Channel(alphabet, alphabet, std::move(rows));
}

Channel Channel::constant(const Alphabet& input, const Alphabet& output, int target) {
  if (target < 0 || target >= output.size()) {
    throw UsageError("constant channel target out of range");
  }
  const auto in = static_cast<std::size_t>(input.size());
  const auto out = static_cast<std::size_t>(output.size());
  std::vector<double> rows(in * out, 0.0);
  for (std::size_t i = 0; i < in; ++i) rows[i * out + static_cast<std::size_t>(target)] = 1.0;
  return Channel(input, output, std::move(rows));
}

Channel Channel::deterministic(const Alphabet& input, const Alphabet& output,
                               std::span<const int> map) {
  if (static_cast<int>(map.size()) != input.size()) {
    throw UsageError("deterministic channel map must cover every input symbol");
  }
  const auto out = static_cast<std::size_t>(output.size());
  std::vector<double> rows(static_cast<std::size_t>(input.size()) * out, 0.0);
  for (std::size_t i = 0; i < map.size(); ++i) {
    const int target = map[i];
    if (target < 0 || target >= output.size()) {
      throw UsageError("deterministic channel maps symbol " + std::to_string(i) +
                       " outside the output alphabet");
    }
    rows[i * out + static_cast<std::size_t>(target)] = 1.0;
  }
  return Channel(input, output, std::move(rows));
}

Channel Channel::binary_symmetric(const Alphabet& input, const Alphabet& output,
                                  double crossover) {
  if (input.size() != 2) throw UsageError("binary symmetric channel needs a binary input");
  if (output.size() < 2) throw UsageError("binary symmetric channel needs |output| >= 2");
  if (!(crossover >= 0.0 && crossover <= 1.0)) {
    throw ValidationError("crossover probability must lie in [0,1]");
  }
  const auto out = static_cast<std::size_t>(output.size());
  std::vector<double> rows(2 * out, 0.0);
  rows[0 * out + 0] = 1.0 - crossover;
  rows[0 * out + 1] = crossover;
  rows[1 * out + 0] = crossover;
  rows[1 * out + 1] = 1.0 - crossover;
  return Channel(input, output, std::move(rows));
}

std::span<const double> Channel::row(int in) const {
  const auto out = static_cast<std::size_t>(output_.size());
  return std::span<const double>(rows_).subspan(static_cast<std::size_t>(in) * out, out);
}

double entropy(const JointDistribution& dist) {
  double h = 0.0;
  for (double p : dist.mass()) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError("binary_entropy needs p in [0,1]");
  }
  if (p == 0.0 || p == 1.0) return 0.0;
  return std::max(-p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p), 0.0);
}

JointDistribution marginalize(const JointDistribution& joint, std::span<const int> keep) {
  check_axis_range(joint, keep, "marginalize");
  std::unordered_set<int> seen;
  for (int a : keep) {
    if (!seen.insert(a).second) {
      throw UsageError("marginalize: axis " + std::to_string(a) + " listed twice");
    }
  }

  std::vector<Alphabet> out_axes;
  out_axes.reserve(keep.size());
  std::size_t out_cells = 1;
  for (int a : keep) {
    out_axes.push_back(joint.axis(a));
    out_cells *= static_cast<std::size_t>(joint.axis(a).size());
  }
  std::vector<std::size_t> out_strides(keep.size(), 1);
  for (int i = static_cast<int>(keep.size()) - 2; i >= 0; --i) {
    out_strides[static_cast<std::size_t>(i)] =
        out_strides[static_cast<std::size_t>(i + 1)] *
        static_cast<std::size_t>(out_axes[static_cast<std::size_t>(i + 1)].size());
  }

  std::vector<double> out(out_cells, 0.0);
  const int rank = joint.axis_count();
  std::vector<int> index(static_cast<std::size_t>(rank), 0);
  const auto mass = joint.mass();
  for (std::size_t cell = 0; cell < mass.size(); ++cell) {
    std::size_t dst = 0;
    for (std::size_t k = 0; k < keep.size(); ++k) {
      dst += out_strides[k] * static_cast<std::size_t>(index[static_cast<std::size_t>(keep[k])]);
    }
    out[dst] += mass[cell];
    for (int a = rank - 1; a >= 0; --a) {
      auto& v = index[static_cast<std::size_t>(a)];
      if (++v < joint.axis(a).size()) break;
      v = 0;
    }
  }
  return JointDistribution(std::move(out_axes), std::move(out));
}

JointDistribution condition(const JointDistribution& joint, int axis, int value) {
  if (axis < 0 || axis >= joint.axis_count()) {
    throw UsageError("condition: axis index out of range");
  }
  if (value < 0 || value >= joint.axis(axis).size()) {
    throw UsageError("condition: value out of range for axis '" + joint.axis(axis).name + "'");
  }
  if (joint.axis_count() == 1) {
    throw UsageError("condition: cannot condition away the only axis");
  }

  std::vector<Alphabet> out_axes;
  for (int a = 0; a < joint.axis_count(); ++a) {
    if (a != axis) out_axes.push_back(joint.axis(a));
  }

  std::vector<double> slice;
  slice.reserve(joint.cell_count() / static_cast<std::size_t>(joint.axis(axis).size()));
  const int rank = joint.axis_count();
  std::vector<int> index(static_cast<std::size_t>(rank), 0);
  const auto mass = joint.mass();
  for (std::size_t cell = 0; cell < mass.size(); ++cell) {
    if (index[static_cast<std::size_t>(axis)] == value) slice.push_back(mass[cell]);
    for (int a = rank - 1; a >= 0; --a) {
      auto& v = index[static_cast<std::size_t>(a)];
      if (++v < joint.axis(a).size()) break;
      v = 0;
    }
  }

  const double total = stable_sum(slice);
  if (total <= 0.0) {
    throw UnsupportedConditionError("conditioning on zero-probability value '" +
                                    joint.axis(axis).labels[static_cast<std::size_t>(value)] +
                                    "' of axis '" + joint.axis(axis).name + "'");
  }
  for (double& v : slice) v /= total;
  return JointDistribution(std::move(out_axes), std::move(slice));
}

double mutual_information(const JointDistribution& joint, std::span<const int> group_a,
                          std::span<const int> group_b) {
  check_axis_range(joint, group_a, "mutual_information");
  check_axis_range(joint, group_b, "mutual_information");
  check_disjoint(group_a, group_b, "mutual_information");

  std::vector<int> keep(group_a.begin(), group_a.end());
  keep.insert(keep.end(), group_b.begin(), group_b.end());
  const JointDistribution ab = marginalize(joint, keep);

  const std::size_t na = group_a.size();
  std::vector<int> a_axes(na), b_axes(group_b.size());
  std::iota(a_axes.begin(), a_axes.end(), 0);
  std::iota(b_axes.begin(), b_axes.end(), static_cast<int>(na));
  const JointDistribution pa = marginalize(ab, a_axes);
  const JointDistribution pb = marginalize(ab, b_axes);

  const std::size_t b_cells = pb.cell_count();
  std::vector<double> terms;
  terms.reserve(ab.cell_count());
  const auto mass = ab.mass();
  for (std::size_t cell = 0; cell < mass.size(); ++cell) {
    const double p_ab = mass[cell];
    if (p_ab == 0.0) continue;
    const double p_a = pa.mass()[cell / b_cells];
    const double p_b = pb.mass()[cell % b_cells];
    terms.push_back(p_ab * log2_ratio(p_ab, p_a * p_b));
  }
  const double bits = stable_sum(terms);
  if (bits < -kNegativeInformationTolerance) {
    throw NumericalError("mutual information evaluated to " + std::to_string(bits) +
                         " bits, below the -1e-10 floor");
  }
  return std::max(bits, 0.0);
}

ConditionalInformation conditional_mutual_information(const JointDistribution& joint,
                                                      std::span<const int> group_a,
                                                      std::span<const int> group_b,
                                                      int conditioning_axis) {
  check_axis_range(joint, group_a, "conditional_mutual_information");
  check_axis_range(joint, group_b, "conditional_mutual_information");
  check_disjoint(group_a, group_b, "conditional_mutual_information");
  const int cond[] = {conditioning_axis};
  check_axis_range(joint, cond, "conditional_mutual_information");
  check_disjoint(group_a, cond, "conditional_mutual_information");
  check_disjoint(group_b, cond, "conditional_mutual_information");

  const JointDistribution pc = marginalize(joint, cond);

  // Axis indices shift down by one past the removed conditioning axis.
  auto remap = [conditioning_axis](std::span<const int> group) {
    std::vector<int> out;
    out.reserve(group.size());
    for (int a : group) out.push_back(a < conditioning_axis ? a : a - 1);
    return out;
  };
  const std::vector<int> a_mapped = remap(group_a);
  const std::vector<int> b_mapped = remap(group_b);

  ConditionalInformation result;
  for (int value = 0; value < joint.axis(conditioning_axis).size(); ++value) {
    const double weight = pc.mass()[static_cast<std::size_t>(value)];
    if (weight == 0.0) {
      result.skipped_values.push_back(value);
      continue;
    }
    const JointDistribution slice = condition(joint, conditioning_axis, value);
    const double bits = mutual_information(slice, a_mapped, b_mapped);
    result.per_value.emplace_back(value, bits);
    result.bits += weight * bits;
  }
  if (result.per_value.empty()) {
    throw UsageError("conditional_mutual_information: every conditioning value has zero mass");
  }
  return result;
}

JointDistribution push_through_channel(const JointDistribution& joint, int axis,
                                       const Channel& channel, ChannelMode mode) {
  if (axis < 0 || axis >= joint.axis_count()) {
    throw UsageError("push_through_channel: axis index out of range");
  }
  if (joint.axis(axis).size() != channel.input().size()) {
    throw UsageError("push_through_channel: axis '" + joint.axis(axis).name + "' has " +
                     std::to_string(joint.axis(axis).size()) +
                     " symbols but the channel expects " +
                     std::to_string(channel.input().size()));
  }

  const int rank = joint.axis_count();
  const auto out_size = static_cast<std::size_t>(channel.output().size());
  const auto mass = joint.mass();

  std::vector<Alphabet> out_axes = joint.axes();
  std::vector<double> out;
  if (mode == ChannelMode::Replace) {
    out_axes[static_cast<std::size_t>(axis)] = channel.output();
  } else {
    out_axes.push_back(channel.output());
  }
  std::size_t cells = 1;
  for (const auto& a : out_axes) {
    const auto n = static_cast<std::size_t>(a.size());
    if (cells > kMaxTensorCells / n) {
      throw CapacityError("pushed joint would exceed the " +
                          std::to_string(kMaxTensorCells) + "-cell cap");
    }
    cells *= n;
  }
  out.assign(cells, 0.0);

  std::vector<std::size_t> out_strides(out_axes.size(), 1);
  for (int i = static_cast<int>(out_axes.size()) - 2; i >= 0; --i) {
    out_strides[static_cast<std::size_t>(i)] =
        out_strides[static_cast<std::size_t>(i + 1)] *
        static_cast<std::size_t>(out_axes[static_cast<std::size_t>(i + 1)].size());
  }

  std::vector<int> index(static_cast<std::size_t>(rank), 0);
  for (std::size_t cell = 0; cell < mass.size(); ++cell) {
    const double p = mass[cell];
    if (p != 0.0) {
      const int x = index[static_cast<std::size_t>(axis)];
      std::size_t base = 0;
      for (int a = 0; a < rank; ++a) {
        if (mode == ChannelMode::Replace && a == axis) continue;
        base += out_strides[static_cast<std::size_t>(a)] *
                static_cast<std::size_t>(index[static_cast<std::size_t>(a)]);
      }
      const std::size_t z_stride =
          mode == ChannelMode::Replace ? out_strides[static_cast<std::size_t>(axis)] : 1;
      const auto row = channel.row(x);
      for (std::size_t z = 0; z < out_size; ++z) {
        if (row[z] != 0.0) out[base + z_stride * z] += p * row[z];
      }
    }
    for (int a = rank - 1; a >= 0; --a) {
      auto& v = index[static_cast<std::size_t>(a)];
      if (++v < joint.axis(a).size()) break;
      v = 0;
    }
  }
  return JointDistribution(std::move(out_axes), std::move(out));
}

}  // namespace invarlab
