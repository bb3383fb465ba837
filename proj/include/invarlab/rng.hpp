#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace invarlab {

/// Derive an independent stream seed; pure function of its inputs.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Deterministic random source. mt19937_64 is fully specified by the
/// standard and every transform below is fixed arithmetic, so a seed
/// produces the same draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in the open interval (0,1); never returns an endpoint.
  double uniform();

  /// Uniform integer in [0, bound).
  int uniform_int(int bound);

  /// Standard normal via Box-Muller.
  double normal();

  /// Gamma(shape, 1) via Marsaglia-Tsang.
  double gamma(double shape);

  /// Symmetric Dirichlet draw of length n with the given concentration.
  std::vector<double> dirichlet(std::size_t n, double concentration);

 private:
  std::mt19937_64 engine_;
};

}  // namespace invarlab
