#pragma once

#include <string>

#include "invarlab/lab.hpp"
#include "invarlab/optimize.hpp"

namespace invarlab {

inline constexpr const char* kToolName = "invarlab";
inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes shared by dispatch() and the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;     // configuration / parse errors
inline constexpr int kExitNumerical = 2; // a numerical invariant failed
inline constexpr int kExitCapacity = 3;  // size or enumeration cap exceeded

/// One resolved command-line invocation.
struct RunConfig {
  std::string command;  // info | frontier | prop1 | prop2 | search
  std::string scenario_path;
  std::string encoder_spec = "identity";  // identity|constant|enumerate|optimize|FILE
  int z_size = 0;                          // 0 means |X|
  double lambda = 0.0;                     // used by encoder_spec = optimize
  double lambda_min = 1e-3;
  double lambda_max = 1e3;
  int lambda_points = 33;
  std::string mode = "info";  // info | risk
  int restarts = 16;
  int max_iters = 10000;
  double tolerance = 1e-10;
  double invariance_tolerance = 1e-9;
  double slack_margin = 1e-6;
  std::uint64_t seed = 0;
  int instances = 100;
  std::string scanner_family = "free-random";
  ScenarioSizes sizes{3, 3, 3};
  double concentration = 1.0;
  int label = -1;      // prop2; -1 auto-detects the first exclusive label
  int home_site = -1;  // prop2; -1 derives it from the label
  std::string out_dir = ".";
};

/// Run one command end to end: load inputs, compute, write report files
/// under out_dir. Returns the process exit code and reports failures on
/// stderr instead of throwing.
int dispatch(const RunConfig& config);

}  // namespace invarlab
