#include "invarlab/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "invarlab/rng.hpp"

namespace invarlab {

namespace {

// Floor keeping boundary log-ratios finite; never active at interior points.
constexpr double kMassFloor = 1e-300;
constexpr double kArmijoC = 1e-4;
constexpr double kMinStep = 1e-14;
constexpr double kMaxStep = 1e6;
constexpr std::uint64_t kWarmStartCap = 200'000;

/// Fixed tables of the scenario joint that the objective needs.
struct EncoderProblem {
  int y_size = 0;
  int s_size = 0;
  int x_size = 0;
  int z_size = 0;
  std::vector<double> p_x;   // |X|
  std::vector<double> p_y;   // |Y|
  std::vector<double> p_s;   // |S|
  std::vector<double> p_yx;  // |Y| x |X|
  std::vector<double> p_sx;  // |S| x |X|
  double lambda = 0.0;
  TradeoffMode mode = TradeoffMode::Info;

  EncoderProblem(const JointDistribution& joint, int z, double lam, TradeoffMode m) {
    if (joint.axis_count() != 3) {
      throw UsageError("encoder optimization expects a (labels, sites, observations) joint");
    }
    y_size = joint.axis(kLabelAxis).size();
    s_size = joint.axis(kSiteAxis).size();
    x_size = joint.axis(kObservationAxis).size();
    z_size = z;
    lambda = lam;
    mode = m;
    const int x_keep[] = {kObservationAxis};
    const int y_keep[] = {kLabelAxis};
    const int s_keep[] = {kSiteAxis};
    const int yx_keep[] = {kLabelAxis, kObservationAxis};
    const int sx_keep[] = {kSiteAxis, kObservationAxis};
    auto grab = [](const JointDistribution& d) {
      return std::vector<double>(d.mass().begin(), d.mass().end());
    };
    p_x = grab(marginalize(joint, x_keep));
    p_y = grab(marginalize(joint, y_keep));
    p_s = grab(marginalize(joint, s_keep));
    p_yx = grab(marginalize(joint, yx_keep));
    p_sx = grab(marginalize(joint, sx_keep));
  }

  std::size_t table_size() const {
    return static_cast<std::size_t>(x_size) * static_cast<std::size_t>(z_size);
  }

  struct Stats {
    double i_y_z = 0.0;
    double i_z_s = 0.0;
    double risk = 0.0;
  };

  /// Push the encoder table through the fixed joint and read off the
  /// information terms; gradient of the maximized objective is optional.
  double evaluate(std::span<const double> q, double* grad, Stats* stats_out) const {
    const auto zs = static_cast<std::size_t>(z_size);
    std::vector<double> p_z(zs, 0.0);
    std::vector<double> p_yz(static_cast<std::size_t>(y_size) * zs, 0.0);
    std::vector<double> p_sz(static_cast<std::size_t>(s_size) * zs, 0.0);
    for (int x = 0; x < x_size; ++x) {
      for (int z = 0; z < z_size; ++z) {
        const double w = q[static_cast<std::size_t>(x) * zs + static_cast<std::size_t>(z)];
        if (w == 0.0) continue;
        p_z[static_cast<std::size_t>(z)] += p_x[static_cast<std::size_t>(x)] * w;
        for (int y = 0; y < y_size; ++y) {
          p_yz[static_cast<std::size_t>(y) * zs + static_cast<std::size_t>(z)] +=
              p_yx[static_cast<std::size_t>(y) * static_cast<std::size_t>(x_size) +
                   static_cast<std::size_t>(x)] * w;
        }
        for (int s = 0; s < s_size; ++s) {
          p_sz[static_cast<std::size_t>(s) * zs + static_cast<std::size_t>(z)] +=
              p_sx[static_cast<std::size_t>(s) * static_cast<std::size_t>(x_size) +
                   static_cast<std::size_t>(x)] * w;
        }
      }
    }

    double i_y_z = 0.0;
    for (int y = 0; y < y_size; ++y) {
      for (int z = 0; z < z_size; ++z) {
        const double p = p_yz[static_cast<std::size_t>(y) * zs + static_cast<std::size_t>(z)];
        if (p > 0.0) {
          i_y_z += p * std::log2(p / (p_y[static_cast<std::size_t>(y)] *
                                      p_z[static_cast<std::size_t>(z)]));
        }
      }
    }
    double i_z_s = 0.0;
    for (int s = 0; s < s_size; ++s) {
      for (int z = 0; z < z_size; ++z) {
        const double p = p_sz[static_cast<std::size_t>(s) * zs + static_cast<std::size_t>(z)];
        if (p > 0.0) {
          i_z_s += p * std::log2(p / (p_s[static_cast<std::size_t>(s)] *
                                      p_z[static_cast<std::size_t>(z)]));
        }
      }
    }
    i_y_z = std::max(i_y_z, 0.0);
    i_z_s = std::max(i_z_s, 0.0);

    std::vector<int> map_best_y;
    double risk = 0.0;
    if (mode == TradeoffMode::Risk || stats_out != nullptr) {
      map_best_y.assign(zs, 0);
      double kept = 0.0;
      for (int z = 0; z < z_size; ++z) {
        double best = -1.0;
        int best_y = 0;
        for (int y = 0; y < y_size; ++y) {
          const double p = p_yz[static_cast<std::size_t>(y) * zs + static_cast<std::size_t>(z)];
          if (p > best) {
            best = p;
            best_y = y;
          }
        }
        map_best_y[static_cast<std::size_t>(z)] = best_y;
        kept += best;
      }
      risk = std::clamp(1.0 - kept, 0.0, 1.0);
    }

    if (stats_out != nullptr) *stats_out = Stats{i_y_z, i_z_s, risk};

    if (grad != nullptr) {
      for (int x = 0; x < x_size; ++x) {
        for (int z = 0; z < z_size; ++z) {
          const double pz = std::max(p_z[static_cast<std::size_t>(z)], kMassFloor);
          double g_info = 0.0;
          for (int y = 0; y < y_size; ++y) {
            const double pyx = p_yx[static_cast<std::size_t>(y) *
                                        static_cast<std::size_t>(x_size) +
                                    static_cast<std::size_t>(x)];
            if (pyx == 0.0) continue;
            const double pyz = std::max(
                p_yz[static_cast<std::size_t>(y) * zs + static_cast<std::size_t>(z)],
                kMassFloor);
            g_info += pyx * std::log2(pyz / (p_y[static_cast<std::size_t>(y)] * pz));
          }
          double g_site = 0.0;
          for (int s = 0; s < s_size; ++s) {
            const double psx = p_sx[static_cast<std::size_t>(s) *
                                        static_cast<std::size_t>(x_size) +
                                    static_cast<std::size_t>(x)];
            if (psx == 0.0) continue;
            const double psz = std::max(
                p_sz[static_cast<std::size_t>(s) * zs + static_cast<std::size_t>(z)],
                kMassFloor);
            g_site += psx * std::log2(psz / (p_s[static_cast<std::size_t>(s)] * pz));
          }
          double g;
          if (mode == TradeoffMode::Info) {
            g = g_info - lambda * g_site;
          } else {
            // subgradient of -(risk + lambda I(z,s))
            const int best_y = map_best_y[static_cast<std::size_t>(z)];
            g = p_yx[static_cast<std::size_t>(best_y) * static_cast<std::size_t>(x_size) +
                     static_cast<std::size_t>(x)] -
                lambda * g_site;
          }
          grad[static_cast<std::size_t>(x) * zs + static_cast<std::size_t>(z)] = g;
        }
      }
    }

    // value of the maximized surrogate
    if (mode == TradeoffMode::Info) return i_y_z - lambda * i_z_s;
    return -(risk + lambda * i_z_s);
  }
};

/// Lexicographically best deterministic table under the maximized objective.
std::vector<double> warm_start_table(const EncoderProblem& problem) {
  const auto zs = static_cast<std::size_t>(problem.z_size);
  std::vector<double> table(problem.table_size(), 0.0);

  std::uint64_t total_maps = 1;
  bool enumerable = true;
  for (int i = 0; i < problem.x_size; ++i) {
    if (total_maps > kWarmStartCap / static_cast<std::uint64_t>(problem.z_size)) {
      enumerable = false;
      break;
    }
    total_maps *= static_cast<std::uint64_t>(problem.z_size);
  }
  if (!enumerable) {
    for (int x = 0; x < problem.x_size; ++x) {
      table[static_cast<std::size_t>(x) * zs + static_cast<std::size_t>(x % problem.z_size)] =
          1.0;
    }
    return table;
  }

  std::vector<int> map(static_cast<std::size_t>(problem.x_size), 0);
  std::vector<double> candidate(problem.table_size(), 0.0);
  double best_value = 0.0;
  bool have_best = false;
  for (std::uint64_t m = 0; m < total_maps; ++m) {
    std::fill(candidate.begin(), candidate.end(), 0.0);
    for (int x = 0; x < problem.x_size; ++x) {
      candidate[static_cast<std::size_t>(x) * zs +
                static_cast<std::size_t>(map[static_cast<std::size_t>(x)])] = 1.0;
    }
    const double value = problem.evaluate(candidate, nullptr, nullptr);
    if (!have_best || value > best_value) {
      have_best = true;
      best_value = value;
      table = candidate;
    }
    for (int x = problem.x_size - 1; x >= 0; --x) {
      auto& digit = map[static_cast<std::size_t>(x)];
      if (++digit < problem.z_size) break;
      digit = 0;
    }
  }
  return table;
}

struct RestartOutcome {
  std::vector<double> table;
  double value = 0.0;
  bool converged = false;
};

RestartOutcome run_restart(const EncoderProblem& problem, std::vector<double> table,
                           const OptimizeOptions& options) {
  const std::size_t n = problem.table_size();
  const auto zs = static_cast<std::size_t>(problem.z_size);
  std::vector<double> grad(n, 0.0);
  std::vector<double> trial(n, 0.0);

  double value = problem.evaluate(table, grad.data(), nullptr);
  double step = options.initial_step;
  bool converged = false;

  for (int iter = 0; iter < options.max_iters; ++iter) {
    step = std::min(step * 2.0, kMaxStep);
    bool accepted = false;
    double trial_value = value;
    while (step >= kMinStep) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = table[i] + step * grad[i];
      for (int x = 0; x < problem.x_size; ++x) {
        project_to_simplex(std::span<double>(trial).subspan(static_cast<std::size_t>(x) * zs, zs));
      }
      double directional = 0.0;
      for (std::size_t i = 0; i < n; ++i) directional += grad[i] * (trial[i] - table[i]);
      if (directional <= 0.0) break;  // stationary for this step size
      trial_value = problem.evaluate(trial, nullptr, nullptr);
      if (trial_value >= value + kArmijoC * directional) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      converged = true;  // no feasible ascent step: projected-stationary
      break;
    }
    const double gain = trial_value - value;
    table.swap(trial);
    value = problem.evaluate(table, grad.data(), nullptr);
    if (std::abs(gain) < options.tolerance) {
      converged = true;
      break;
    }
  }
  return RestartOutcome{std::move(table), value, converged};
}

}  // namespace

void project_to_simplex(std::span<double> values) {
  if (values.empty()) throw UsageError("cannot project an empty vector");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double running = 0.0;
  double threshold = sorted[0] - 1.0;  // j = 0 always qualifies
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    running += sorted[j];
    const double candidate = (running - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) threshold = candidate;
  }
  for (double& v : values) v = std::max(v - threshold, 0.0);
}

std::string to_string(TradeoffMode mode) {
  return mode == TradeoffMode::Info ? "info" : "risk";
}

ObjectiveEval lagrangian_objective(const JointDistribution& joint_ysx,
                                   std::span<const double> encoder_rows, int z_size,
                                   double lambda, TradeoffMode mode) {
  if (z_size < 1) throw UsageError("z_size must be >= 1");
  const EncoderProblem problem(joint_ysx, z_size, lambda, mode);
  if (encoder_rows.size() != problem.table_size()) {
    throw UsageError("encoder table has the wrong shape");
  }
  ObjectiveEval eval;
  eval.gradient.assign(problem.table_size(), 0.0);
  const double maximized = problem.evaluate(encoder_rows, eval.gradient.data(), nullptr);
  if (mode == TradeoffMode::Info) {
    eval.value = maximized;
  } else {
    // report the minimized objective and its own gradient
    eval.value = -maximized;
    for (double& g : eval.gradient) g = -g;
  }
  return eval;
}

TradeoffPoint lagrangian_optimize(const JointDistribution& joint_ysx, double lambda,
                                  TradeoffMode mode, const OptimizeOptions& options) {
  if (lambda < 0.0) throw UsageError("lambda must be nonnegative");
  if (options.restarts < 1) throw UsageError("need at least one restart");
  const int z_size = options.z_size > 0 ? options.z_size
                                        : joint_ysx.axis(kObservationAxis).size();
  const EncoderProblem problem(joint_ysx, z_size, lambda, mode);
  const auto zs = static_cast<std::size_t>(z_size);

  RestartOutcome best;
  bool have_best = false;
  for (int restart = 0; restart < options.restarts; ++restart) {
    std::vector<double> init;
    if (restart == 0) {
      init = warm_start_table(problem);
    } else {
      Rng rng(mix_seed(options.seed, static_cast<std::uint64_t>(restart)));
      init.reserve(problem.table_size());
      for (int x = 0; x < problem.x_size; ++x) {
        const auto row = rng.dirichlet(zs, 1.0);
        init.insert(init.end(), row.begin(), row.end());
      }
    }
    RestartOutcome outcome = run_restart(problem, std::move(init), options);
    if (!have_best || outcome.value > best.value) {
      have_best = true;
      best = std::move(outcome);
    }
  }

  TradeoffPoint point;
  point.lambda = lambda;
  point.converged = best.converged;
  point.restarts_used = options.restarts;
  point.encoder = stochastic_encoder(joint_ysx.axis(kObservationAxis), std::move(best.table),
                                     z_size);
  point.report = evaluate_encoder(joint_ysx, point.encoder);
  point.objective_value = mode == TradeoffMode::Info
                              ? point.report.i_y_z - lambda * point.report.i_z_s
                              : point.report.risk + lambda * point.report.i_z_s;
  return point;
}

Frontier sweep_frontier(const JointDistribution& joint_ysx,
                        std::span<const double> lambda_grid, TradeoffMode mode,
                        const OptimizeOptions& options) {
  if (lambda_grid.empty()) throw UsageError("lambda grid must be nonempty");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (lambda_grid[i] < 0.0) throw UsageError("lambda grid must be nonnegative");
    if (i > 0 && lambda_grid[i] < lambda_grid[i - 1]) {
      throw UsageError("lambda grid must be sorted ascending");
    }
  }

  Frontier frontier;
  frontier.points.reserve(lambda_grid.size());
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    OptimizeOptions point_options = options;
    point_options.seed = mix_seed(options.seed, i);
    frontier.points.push_back(
        lagrangian_optimize(joint_ysx, lambda_grid[i], mode, point_options));
  }

  // Pareto filter in (higher I(y,z), lower I(z,s)).
  for (std::size_t i = 0; i < frontier.points.size(); ++i) {
    const auto& a = frontier.points[i].report;
    bool dominated = false;
    bool duplicate = false;
    for (std::size_t j = 0; j < frontier.points.size() && !dominated; ++j) {
      if (i == j) continue;
      const auto& b = frontier.points[j].report;
      if (b.i_y_z >= a.i_y_z && b.i_z_s <= a.i_z_s &&
          (b.i_y_z > a.i_y_z || b.i_z_s < a.i_z_s)) {
        dominated = true;
      }
      if (j < i && b.i_y_z == a.i_y_z && b.i_z_s == a.i_z_s) duplicate = true;
    }
    if (!dominated && !duplicate) frontier.pareto.push_back(i);
  }
  // In a dominance-free set the two coordinates order identically, so this
  // makes both nonincreasing along the sequence.
  std::sort(frontier.pareto.begin(), frontier.pareto.end(),
            [&frontier](std::size_t a, std::size_t b) {
              const auto& ra = frontier.points[a].report;
              const auto& rb = frontier.points[b].report;
              if (ra.i_y_z != rb.i_y_z) return ra.i_y_z > rb.i_y_z;
              if (ra.i_z_s != rb.i_z_s) return ra.i_z_s > rb.i_z_s;
              return a < b;
            });
  return frontier;
}

std::vector<double> default_lambda_grid(double lambda_min, double lambda_max, int points) {
  if (points < 1) throw UsageError("lambda grid needs at least one point");
  if (!(lambda_min > 0.0) || lambda_max < lambda_min) {
    throw UsageError("lambda bounds must satisfy 0 < min <= max");
  }
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points) + 1);
  grid.push_back(0.0);
  if (points == 1) {
    grid.push_back(lambda_min);
    return grid;
  }
  const double log_min = std::log10(lambda_min);
  const double log_max = std::log10(lambda_max);
  for (int i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
    grid.push_back(std::pow(10.0, log_min + t * (log_max - log_min)));
  }
  return grid;
}

}  // namespace invarlab
