#pragma once

#include <iosfwd>
#include <string>

#include "towlab/config.hpp"

namespace towlab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNoConvergence = 3;

// Executes the selected experiment, writing the JSON report and the
// plot-ready CSV files into cfg.out_dir. Messages go to log. Returns
// one of the exit codes above; a failed verdict is still a successful
// experiment (exit 0).
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

// Convenience wrapper: load, run, map errors to exit codes.
int run_config_file(const std::string& path,
                    const std::vector<std::string>& overrides, std::ostream& log);

}  // namespace towlab
