#pragma once

#include "degenpar/degeneracy.hpp"
#include "degenpar/oracle.hpp"
#include "degenpar/solver.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace degenpar {

/// One experiment: sectioned `key = value` text, `#` comments.
struct ExperimentConfig {
    std::string name = "experiment";
    std::uint64_t seed = 1;

    int dim = 1;
    int n = 256;
    double length = 20.0;

    std::string partition_type = "geometric";  // geometric | uniform
    int intervals = 64;
    double horizon = 1.0;
    std::optional<double> ratio;

    std::string profile = "constant(1)";

    /// A = scale·δ(t)·I unless entries are given; entries are row-major "aIJ" specs, 1-based.
    double coefficient_scale = 1.0;
    std::map<std::string, std::string> coefficient_entries;

    std::string initial = "gaussian(1)";

    /// f(t, x) = time(t)·shape(x); an empty shape means f = 0.
    std::string forcing_time = "constant(1)";
    std::string forcing_shape;

    double smoothness = 0.0;  // n in H^n_p
    double p = 2.0;
    std::vector<double> gammas{0.0};
    std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};
    std::string h_grid = "logspace(1e-7, 1e-3, 12)";
    double t0 = 0.5;
    std::vector<int> blocks{1, 2, 3, 4, 5, 6};
    std::string t_samples = "logspace(1e-3, 1, 8)";

    std::size_t samples = 100000;
    double theta = 0.5;
    std::string sampling = "theta_point";  // theta_point | step_average
    std::vector<double> probes{-1.0, -0.5, 0.0, 0.5, 1.0};
    std::vector<int> fd_levels{32, 64, 128};

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct Diagnostic {
    int line = 0;  // 0 when the field is absent from the file
    std::string field;
    std::string message;
};

std::string to_string(const Diagnostic& d);

struct ParsedConfig {
    ExperimentConfig config;
    std::vector<Diagnostic> diagnostics;
    /// "section.key" → source line.
    std::map<std::string, int> lines;
};

/// Syntax and type errors become diagnostics; unknown sections and keys too.
ParsedConfig parse_config(const std::string& text);
ParsedConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

/// Cross-field checks: every spec parses, ranges hold, rough-data scales fit the grid, ...
std::vector<Diagnostic> validate(const ExperimentConfig& config, const std::map<std::string, int>& lines = {});

/// "logspace(a, b, n)" or a comma list.
std::vector<double> parse_number_list(const std::string& text);

// Builders for validated configs.
GridSpec build_grid(const ExperimentConfig& c);
TimePartition build_partition(const ExperimentConfig& c);
DegeneracyProfile build_profile(const ExperimentConfig& c);
CoefficientPath build_path(const ExperimentConfig& c);
SpectralField build_initial(const ExperimentConfig& c);
Forcing build_forcing(const ExperimentConfig& c);

/// zero | gaussian(σ) | mode(k1[, k2, k3]) | rough(s[, seed[, jmax]]); rough uses the exponent p.
SpectralField build_field(const std::string& spec, const GridSpec& grid, double p);

}  // namespace degenpar
