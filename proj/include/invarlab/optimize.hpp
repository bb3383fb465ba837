#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "invarlab/lab.hpp"

namespace invarlab {

/// Euclidean projection onto the probability simplex, in place.
void project_to_simplex(std::span<double> values);

enum class TradeoffMode {
  Info,  ///< maximize I(y,z) - lambda * I(z,s)
  Risk,  ///< minimize risk + lambda * I(z,s)
};

std::string to_string(TradeoffMode mode);

struct OptimizeOptions {
  int z_size = 0;  ///< 0 means |X|
  int restarts = 16;
  int max_iters = 10000;
  double tolerance = 1e-10;
  std::uint64_t seed = 0;
  double initial_step = 1.0;
};

/// Value and gradient of the mode's objective at a given encoder table
/// (row-major |X| x z_size). Info mode reports the quantity to maximize,
/// risk mode the quantity to minimize.
struct ObjectiveEval {
  double value = 0.0;
  std::vector<double> gradient;
};

ObjectiveEval lagrangian_objective(const JointDistribution& joint_ysx,
                                   std::span<const double> encoder_rows, int z_size,
                                   double lambda, TradeoffMode mode);

/// One solved point of the risk/invariance trade-off.
struct TradeoffPoint {
  double lambda = 0.0;
  InformationReport report;
  double objective_value = 0.0;
  bool converged = false;
  int restarts_used = 0;
  Encoder encoder;
};

/// Multi-restart projected gradient over stochastic encoder tables:
/// one deterministic warm start plus restarts-1 random initializations,
/// backtracking line search, deterministic given (inputs, seed).
TradeoffPoint lagrangian_optimize(const JointDistribution& joint_ysx, double lambda,
                                  TradeoffMode mode, const OptimizeOptions& options = {});

struct Frontier {
  std::vector<TradeoffPoint> points;
  /// Indices of points not dominated in (higher I(y,z), lower I(z,s)),
  /// ordered so both quantities are nonincreasing along the sequence.
  std::vector<std::size_t> pareto;
};

Frontier sweep_frontier(const JointDistribution& joint_ysx,
                        std::span<const double> lambda_grid, TradeoffMode mode,
                        const OptimizeOptions& options = {});

/// The default frontier grid: 0 plus `points` log-spaced values in
/// [lambda_min, lambda_max].
std::vector<double> default_lambda_grid(double lambda_min = 1e-3, double lambda_max = 1e3,
                                        int points = 33);

}  // namespace invarlab
