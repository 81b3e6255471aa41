#pragma once

#include "degenpar/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace degenpar {

enum ExitCode : int {
    exit_ok = 0,
    exit_internal_error = 1,
    exit_inadmissible = 2,
    exit_invalid_config = 3,
    exit_check_failed = 4,
};

struct RunOptions {
    std::string out_dir = "out";
    int workers = 1;
    std::optional<std::uint64_t> seed;
    /// Multiplies every declared tolerance (standard-error multiples, order slack, ratio factors).
    double tolerance_scale = 1.0;
};

const std::vector<std::string>& subcommands();
/// One-line title of a subcommand, empty if unknown.
std::string describe(const std::string& subcommand);

/// Runs one subcommand on a validated config; writes <out_dir>/<subcommand>.csv (plus extras) and summary.txt.
int run(const std::string& subcommand, const ExperimentConfig& config, const RunOptions& opts, std::ostream& log);

/// Loads, validates (exit 3 with diagnostics on failure) and runs.
int run_file(const std::string& subcommand, const std::string& config_path, const RunOptions& opts,
             std::ostream& log);

/// Trigonometric interpolant of the field evaluated at x.
double evaluate_spectral(const SpectralField& u, const Eigen::VectorXd& x);

}  // namespace degenpar
