#pragma once

// Test-only oracles, written against the raw definitions so they stay
// independent of the library code paths they check.

#include <cmath>
#include <vector>

#include "invarlab/prob.hpp"
#include "invarlab/rng.hpp"

namespace testutil {

/// Closed-form binary entropy, straight from the definition.
inline double h2_ref(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

/// Entropy of a raw mass vector.
inline double entropy_ref(std::span<const double> mass) {
  double h = 0.0;
  for (double p : mass) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

/// I(row; col) of a row-major table, computed by direct summation.
inline double mi_table_ref(std::span<const double> table, int rows, int cols) {
  std::vector<double> pr(static_cast<std::size_t>(rows), 0.0);
  std::vector<double> pc(static_cast<std::size_t>(cols), 0.0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double p = table[static_cast<std::size_t>(r * cols + c)];
      pr[static_cast<std::size_t>(r)] += p;
      pc[static_cast<std::size_t>(c)] += p;
    }
  }
  double bits = 0.0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double p = table[static_cast<std::size_t>(r * cols + c)];
      if (p > 0.0) {
        bits += p * std::log2(p / (pr[static_cast<std::size_t>(r)] *
                                   pc[static_cast<std::size_t>(c)]));
      }
    }
  }
  return bits;
}

/// Random normalized joint over the given axis sizes.
inline invarlab::JointDistribution random_joint(invarlab::Rng& rng,
                                                std::vector<int> sizes,
                                                double concentration = 1.0) {
  std::vector<invarlab::Alphabet> axes;
  std::size_t cells = 1;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    axes.push_back(invarlab::Alphabet::indexed("a" + std::to_string(i), sizes[i]));
    cells *= static_cast<std::size_t>(sizes[i]);
  }
  return invarlab::JointDistribution(std::move(axes), rng.dirichlet(cells, concentration));
}

/// Random row-stochastic channel.
inline invarlab::Channel random_channel(invarlab::Rng& rng, const invarlab::Alphabet& input,
                                        const invarlab::Alphabet& output,
                                        double concentration = 1.0) {
  std::vector<double> rows;
  rows.reserve(static_cast<std::size_t>(input.size()) *
               static_cast<std::size_t>(output.size()));
  for (int i = 0; i < input.size(); ++i) {
    const auto row = rng.dirichlet(static_cast<std::size_t>(output.size()), concentration);
    rows.insert(rows.end(), row.begin(), row.end());
  }
  return invarlab::Channel(input, output, std::move(rows));
}

}  // namespace testutil
