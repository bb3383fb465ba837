#include "invarlab/rng.hpp"

#include <cmath>

#include "invarlab/errors.hpp"
#include "invarlab/prob.hpp"

namespace invarlab {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  // 53 bits, shifted into (0,1)
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

int Rng::uniform_int(int bound) {
  if (bound <= 0) throw UsageError("uniform_int needs a positive bound");
  const auto b = static_cast<std::uint64_t>(bound);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % b;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return static_cast<int>(v % b);
}

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) throw UsageError("gamma shape must be positive");
  if (shape < 1.0) {
    const double boost = std::pow(uniform(), 1.0 / shape);
    return gamma(shape + 1.0) * boost;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::vector<double> Rng::dirichlet(std::size_t n, double concentration) {
  if (n == 0) throw UsageError("dirichlet needs at least one component");
  if (!(concentration > 0.0)) throw UsageError("dirichlet concentration must be positive");
  std::vector<double> draw(n);
  for (double& v : draw) v = gamma(concentration);
  const double total = stable_sum(draw);
  if (total <= 0.0) {
    // all draws underflowed; fall back to uniform
    const double u = 1.0 / static_cast<double>(n);
    for (double& v : draw) v = u;
    return draw;
  }
  for (double& v : draw) v /= total;
  return draw;
}

}  // namespace invarlab
