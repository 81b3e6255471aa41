#pragma once

#include "degenpar/degeneracy.hpp"
#include "degenpar/solver.hpp"
#include "degenpar/spectral.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace degenpar {

struct WeightedNormSpec {
    double n = 0.0;
    double p = 2.0;
    double m = 0.0;
    DegeneracyProfile profile;
};

/// (Σ_k w_k ‖·‖_k^p δ(t_k)^m)^{1/p} with trapezoidal weights w_k, from precomputed spatial norms.
/// 0·∞ := 0 where δ = 0 and m > 0; returns +infinity where δ = 0, m < 0 and the norm is nonzero.
double weighted_time_norm(const std::vector<double>& spatial_norms, const TimePartition& partition,
                          const DegeneracyProfile& profile, double p, double m);

/// Weighted norm of the snapshots in bH^n_p(T, δ^m), T = last partition node.
double weighted_norm(const std::vector<SpectralField>& snapshots, const TimePartition& partition,
                     const WeightedNormSpec& spec);

struct EstimateReport {
    std::string theorem;
    double n = 0.0;
    double p = 2.0;
    double m = 0.0;
    std::string profile_spec;
    int grid_n = 0;
    int intervals = 0;
    double lhs = 0.0;
    std::vector<std::pair<std::string, double>> rhs;
    double ratio = 0.0;
    bool admissible = true;
    std::vector<std::string> flags;
    /// Inputs the fitted constant may depend on (d, p, T, N0, ...).
    std::map<std::string, double> echo;

    double rhs_total() const;
};

/// Sets ratio = lhs / Σ rhs (0 when both vanish, +inf when only rhs does) and flags infinite rhs as inadmissible.
void finalize_ratio(EstimateReport& report);

std::string estimate_csv_header();
std::string to_csv_row(const EstimateReport& report);

/// Weighted maximal regularity: ‖u_xx‖_{bH^n_p(T,δ)} against ‖f‖_{bH^n_p(T,δ^{1-p})} + ‖u0‖_{B^{n+2-2/p}_p}.
EstimateReport check_thm1(const SpectralField& u0, const Forcing& f, const CoefficientPath& path,
                          const DegeneracyProfile& profile, double n, double p, const TimePartition& partition,
                          const SolveOptions& opts = {});
/// Same, on an existing solve.
EstimateReport evaluate_thm1(const SolveReport& report, const Forcing& f, const SpectralField& u0,
                             const DegeneracyProfile& profile, double n, double p);

struct Thm2Inputs {
    BetaFit fit;
    /// Upper end of the level-set window used for the fit.
    double t0 = 1.0;
};

/// Unweighted ‖u_xx‖_{bL_p(T)} against ‖u0‖_{B^{2(1-1/(βp))}_p}, f = 0.
EstimateReport check_thm2(const SpectralField& u0, const CoefficientPath& path, const DegeneracyProfile& profile,
                          double p, const Thm2Inputs& inputs, const TimePartition& partition,
                          const SolveOptions& opts = {});

/// sup_k ‖u(t_k)‖_p against ‖f‖_{bL_p(T)} + ‖u0‖_p.
EstimateReport check_classic(const SolveReport& report, const Forcing& f, const SpectralField& u0, double p);

struct KernelDecaySample {
    int k = 0;
    double t = 0.0;
    double beta = 0.0;
    double mass = 0.0;
    bool below_noise_floor = false;
};

struct KernelDecayFit {
    double gamma = 0.0;
    double n_hat = 0.0;
    double c_hat = 0.0;
    double noise_floor = 0.0;
    std::vector<KernelDecaySample> samples;
    std::vector<std::pair<int, double>> violations;
};

/// ‖Δ^{γ/2} Δ_k p(t,·)‖_{L_1} on the grid.
double kernel_block_mass(const Eigen::MatrixXd& accumulated, const GridSpec& grid, int k, double gamma,
                         const LPFamily& fam);

/// Fits m(k,t) ≤ N 2^{kγ} exp(-c β(t) 4^k) over a logarithmic c-grid on [1e-3, 10]; c is the largest
/// grid value whose N stays within a factor 10 of N at the smallest c. Masses below a noise floor
/// (1e-12 of the largest sampled mass) count as satisfied and are excluded from the fit.
KernelDecayFit check_kernel_decay(const CoefficientPath& path, const DegeneracyProfile& profile, double gamma,
                                  const std::vector<int>& k_range, const std::vector<double>& t_samples,
                                  const GridSpec& grid, const QuadratureOptions& opts = {});

/// check_thm1 on A + εI with profile δ + ε for each ε (positive, decreasing).
std::vector<EstimateReport> epsilon_sweep(const SpectralField& u0, const Forcing& f, const CoefficientPath& path,
                                          const DegeneracyProfile& profile, const std::vector<double>& eps_list,
                                          double n, double p, const TimePartition& partition,
                                          const SolveOptions& opts = {});

}  // namespace degenpar
