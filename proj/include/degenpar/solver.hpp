#pragma once

#include "degenpar/degeneracy.hpp"
#include "degenpar/spectral_field.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace degenpar {

/// Strictly increasing nodes 0 = t_0 < t_1 < ... < t_K = T.
class TimePartition {
public:
    explicit TimePartition(std::vector<double> nodes);

    static TimePartition uniform(int intervals, double horizon);
    /// Nodes 0 and T·ratio^(K-k), k = 1..K; the default ratio puts t_1 at 1e-6·T.
    static TimePartition geometric(int intervals, double horizon, std::optional<double> ratio = std::nullopt);

    const std::vector<double>& nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    int intervals() const noexcept { return static_cast<int>(nodes_.size()) - 1; }
    double horizon() const noexcept { return nodes_.back(); }
    double operator[](std::size_t k) const { return nodes_[k]; }

    /// Trapezoidal weights of the nodes t_0..t_k.
    std::vector<double> trapezoid_weights(std::size_t k) const;

private:
    std::vector<double> nodes_;
};

/// Forcing f(t, ·); an empty function means f = 0.
using Forcing = std::function<SpectralField(double)>;

/// exp(-ξᵀ B ξ) at every grid frequency.
Eigen::ArrayXd propagator_symbol(const Eigen::MatrixXd& accumulated, const Wavevectors& w);

struct PropagatorSymbol {
    double source = 0.0;
    double target = 0.0;
    Eigen::MatrixXd accumulated;

    Eigen::ArrayXd operator()(const Wavevectors& w) const { return propagator_symbol(accumulated, w); }
};

PropagatorSymbol make_propagator(const CoefficientPath& path, double s, double t, const QuadratureOptions& opts = {});

struct SolveReport {
    TimePartition partition;
    std::vector<SpectralField> snapshots;
    /// Exponent used for the per-snapshot norms below.
    double p = 2.0;
    std::vector<double> lp_norms;
    std::vector<double> h2_norms;
    /// Filled by attach_weak_residuals; empty otherwise.
    std::vector<double> weak_residuals;
    std::optional<double> kernel_mass;
    /// ∫_0^{t_k} A for every node.
    std::vector<Eigen::MatrixXd> cumulative;

    double max_weak_residual() const;
};

struct SolveOptions {
    double p = 2.0;
    bool compute_norms = true;
    QuadratureOptions quadrature{};
};

/// ∫_s^t A(r) dr.
Eigen::MatrixXd accumulate_coefficients(const CoefficientPath& path, double s, double t,
                                        const QuadratureOptions& opts = {});

/// Multiply the spectrum of u by exp(-ξᵀ (∫_s^t A) ξ).
SpectralField propagate(const SpectralField& u, const CoefficientPath& path, double s, double t,
                        const QuadratureOptions& opts = {});

/// Kernel p(t, ·) centred at x = 0; its grid integral is 1 by construction.
/// Throws PreconditionViolation when ∫_0^t A is singular (the kernel is a point mass).
SpectralField kernel(const CoefficientPath& path, double t, const GridSpec& grid, const QuadratureOptions& opts = {});
SpectralField kernel_from_accumulated(const Eigen::MatrixXd& accumulated, const GridSpec& grid);

SolveReport solve_homogeneous(const SpectralField& u0, const CoefficientPath& path, const TimePartition& partition,
                              const SolveOptions& opts = {});

/// u(t_k) = T(0,t_k) u0 + trapezoid over nodes s_i ≤ t_k of T(s_i,t_k) f(s_i).
SolveReport solve_duhamel(const SpectralField& u0, const Forcing& f, const CoefficientPath& path,
                          const TimePartition& partition, const SolveOptions& opts = {});

/// Solve in the clock τ = β(t), where the coefficients a(φ(τ)) φ'(τ) are ≥ I,
/// and map back with u(t_k) = v(β(t_k)). Requires δ ≥ ε > 0 on [0, T].
SolveReport time_change_solve(const SpectralField& u0, const Forcing& f, const CoefficientPath& path,
                              const DegeneracyProfile& profile, const TimePartition& partition,
                              const SolveOptions& opts = {});

/// The transformed coefficient path τ ↦ a(φ(τ)) / δ(φ(τ)) on [0, β(T)].
CoefficientPath time_changed_path(const CoefficientPath& path, const DegeneracyProfile& profile, double horizon);

/// |(u(t_k),φ) - (u0,φ) - ∫_0^{t_k} (a^{ij} u, φ_{x^i x^j}) ds - ∫_0^{t_k} (f, φ) ds|, trapezoid in time.
double weak_residual(const SolveReport& report, const Forcing& f, const SpectralField& u0,
                     const CoefficientPath& path, const SpectralField& test, std::size_t k);

/// Fills report.weak_residuals with the largest residual over the given test functions at every node.
void attach_weak_residuals(SolveReport& report, const Forcing& f, const SpectralField& u0,
                           const CoefficientPath& path, const std::vector<SpectralField>& tests);

/// Gaussian bumps exp(-|x-c|²/(2w²)) at a few centres and widths, used as weak-form test functions.
std::vector<SpectralField> default_test_functions(const GridSpec& grid);

/// Writes meta, snap_<k>.bin and norms.csv into dir (created if needed).
void write_report(const SolveReport& report, const std::string& dir, const std::string& meta_extra = {});

}  // namespace degenpar
