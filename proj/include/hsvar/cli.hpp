#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hsvar/io.hpp"

namespace hsvar::cli {

/// Exit codes: 0 success, 1 failed command, 2 usage error, 3 verification infeasible.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

struct EstimateOutputs {
  std::vector<io::fs::path> artifacts;
  std::vector<io::fs::path> moments;
  std::vector<io::fs::path> manifests;
};

/// Runs every chain of the configuration on its own thread with seed
/// base + chain index and writes one artifact, moment file and manifest each.
EstimateOutputs estimate(const io::RunConfig& rc);

/// Quantile by linear interpolation between order statistics.
double quantile(std::vector<double> x, double q);

}  // namespace hsvar::cli
