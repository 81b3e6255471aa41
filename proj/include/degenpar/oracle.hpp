#pragma once

#include "degenpar/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace degenpar {

/// How the θ-scheme samples A on a step [t_k, t_{k+1}].
enum class CoefficientSampling {
    /// A(t_k + θ Δt).
    ThetaPoint,
    /// (1/Δt) ∫ A over the step; needed when A oscillates unboundedly near t = 0.
    StepAverage,
};

struct FDScheme {
    TimePartition partition;
    double theta = 0.5;
    CoefficientSampling sampling = CoefficientSampling::ThetaPoint;
};

/// θ-scheme with periodic central differences (four-point stencils for mixed terms),
/// one sparse LDLᵀ solve per step. Snapshots at every partition node.
SolveReport fd_solve(const SpectralField& u0, const Forcing& f, const CoefficientPath& path, const FDScheme& scheme,
                     const SolveOptions& opts = {});

struct MCOptions {
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    int workers = 1;
    QuadratureOptions quadrature{};
};

struct MCEstimate {
    std::vector<Eigen::VectorXd> points;
    Eigen::ArrayXd mean;
    Eigen::ArrayXd standard_error;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

/// E[u0(x + X_t)] + Σ_i w_i E[f(s_i, x + X_t - X_{s_i})] at each point, t = partition.horizon(),
/// with X built from independent exact Gaussian increments of covariance 2∫A over each partition cell
/// and trapezoidal weights w_i. Fields are evaluated by periodic cubic interpolation.
/// Samples are drawn in fixed-size chunks seeded from the master seed, so results do not depend on workers.
MCEstimate mc_solve(const SpectralField& u0, const Forcing& f, const CoefficientPath& path,
                    const TimePartition& partition, const std::vector<Eigen::VectorXd>& points,
                    const MCOptions& opts = {});

void write_mc_csv(std::ostream& out, const MCEstimate& estimate);

struct CharacteristicCheck {
    Eigen::VectorXd xi;
    double expected = 0.0;
    double real = 0.0;
    double imag = 0.0;
    double se_real = 0.0;
    double se_imag = 0.0;

    /// max(|real - expected| / se_real, |imag| / se_imag).
    double z_score() const;
};

/// Empirical E exp(i ξ·(X_t - X_s)) for s = partition[from], t = partition[to], using the same
/// increment construction as mc_solve, against exp(-ξᵀ (∫_s^t A) ξ).
std::vector<CharacteristicCheck> characteristic_function_check(const CoefficientPath& path,
                                                               const TimePartition& partition, std::size_t from,
                                                               std::size_t to,
                                                               const std::vector<Eigen::VectorXd>& frequencies,
                                                               const MCOptions& opts = {});

/// Symmetric square root of a covariance matrix; eigenvalues in (-1e-12 scale, 0) are clamped to 0,
/// more negative ones throw NumericalError.
Eigen::MatrixXd covariance_sqrt(const Eigen::MatrixXd& covariance);

/// Periodic tensor-product cubic Lagrange interpolation of the samples at x.
double interpolate_periodic(const SpectralField& u, const Eigen::VectorXd& x);

/// ‖a - b‖_p / max(‖a‖_p, 1e-30).
double compare_fields(const SpectralField& a, const SpectralField& b, double p);

}  // namespace degenpar
