#pragma once

#include "degenpar/quadrature.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace degenpar {

/// A real function of time with an optional registered antiderivative.
///
/// The antiderivative, when present, must vanish at t = 0. Integrals fall back
/// to adaptive quadrature otherwise, split at the declared breakpoints.
class ScalarPath {
public:
    using Function = std::function<double(double)>;

    ScalarPath(Function value, std::optional<Function> antiderivative, std::string spec,
               std::vector<double> breakpoints = {});

    double operator()(double t) const { return value_(t); }

    /// ∫_s^t of the path.
    double integral(double s, double t, const QuadratureOptions& opts = {}) const;

    bool has_closed_form() const noexcept { return antiderivative_.has_value(); }
    const std::string& spec() const noexcept { return spec_; }
    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }

    ScalarPath scaled(double c) const;
    ScalarPath shifted(double c) const;

private:
    Function value_;
    std::optional<Function> antiderivative_;
    std::string spec_;
    std::vector<double> breakpoints_;
};

/// Time-dependent ellipticity floor δ(t) ≥ 0 on [0, horizon].
class DegeneracyProfile {
public:
    /// Validates nonnegativity on a sample grid; the bound is sampled when not supplied.
    explicit DegeneracyProfile(ScalarPath delta, double horizon = 10.0,
                               std::optional<double> bound = std::nullopt);

    const ScalarPath& delta() const noexcept { return delta_; }
    double bound() const noexcept { return bound_; }
    double horizon() const noexcept { return horizon_; }
    const std::string& spec() const noexcept { return delta_.spec(); }

private:
    ScalarPath delta_;
    double horizon_;
    double bound_;
};

DegeneracyProfile constant_profile(double c, double horizon = 10.0);
/// δ(t) = t^alpha, alpha ≥ 0.
DegeneracyProfile power_profile(double alpha, double horizon = 10.0);
/// δ(t) = 1 + sin(1/t), with δ(0) := 1.
DegeneracyProfile oscillatory_profile(double horizon = 10.0);
/// δ(t) = t^alpha (log(1+t))^b.
DegeneracyProfile power_log_profile(double alpha, double b, double horizon = 10.0);
DegeneracyProfile expression_profile(const std::string& expr, double horizon = 10.0);
/// Segment i uses pieces[i].second on [pieces[i].first, pieces[i+1].first).
DegeneracyProfile piecewise_profile(const std::vector<std::pair<double, std::string>>& pieces,
                                    double horizon = 10.0);
/// δ + eps, keeping any registered antiderivative.
DegeneracyProfile regularize(const DegeneracyProfile& profile, double eps);

ScalarPath constant_path(double c);
ScalarPath expression_path(const std::string& expr);

double eval_delta(const DegeneracyProfile& profile, double t);

/// β(t) = ∫_0^t δ(s) ds.
double cumulative_delta(const DegeneracyProfile& profile, double t, const QuadratureOptions& opts = {});

/// φ(h) = inf{t ≥ 0 : β(t) ≥ h} by bisection on [0, horizon].
double inverse_cumulative(const DegeneracyProfile& profile, double h, const QuadratureOptions& opts = {});

/// |{t ∈ [0, t0] : h ≤ β(t) < 4h}|.
double levelset_measure(const DegeneracyProfile& profile, double h, double t0,
                        const QuadratureOptions& opts = {});

struct BetaFit {
    double beta_hat = 0.0;
    double n0_hat = 0.0;
    double residual = 0.0;
};

/// Least-squares fit of log|level set| = log N0 + (1/β) log h.
BetaFit fit_beta_exponent(const DegeneracyProfile& profile, double t0, const std::vector<double>& h_grid,
                          const QuadratureOptions& opts = {});

/// Symmetric d×d coefficient path A(t).
class CoefficientPath {
public:
    /// A(t) = g(t) M for a constant symmetric M.
    static CoefficientPath scalar_times(ScalarPath g, const Eigen::MatrixXd& m);
    /// Row-major d×d entries; symmetry is checked at the sample times.
    static CoefficientPath from_entries(int dim, std::vector<ScalarPath> entries,
                                        const std::vector<double>& symmetry_samples = {0.013, 0.1, 0.37, 1.0, 2.9});

    int dim() const noexcept { return dim_; }
    Eigen::MatrixXd operator()(double t) const;
    /// ∫_s^t A(r) dr, entrywise.
    Eigen::MatrixXd accumulate(double s, double t, const QuadratureOptions& opts = {}) const;
    const ScalarPath& entry(int i, int j) const;
    /// max |a_ij(t)| over a sample grid of [0, horizon].
    double bound(double horizon) const;
    std::string spec() const;

    /// Present when the path was built by scalar_times.
    const std::optional<std::pair<ScalarPath, Eigen::MatrixXd>>& factored() const noexcept { return factored_; }

private:
    CoefficientPath(int dim, std::vector<ScalarPath> entries);

    int dim_;
    std::vector<ScalarPath> entries_;
    std::optional<std::pair<ScalarPath, Eigen::MatrixXd>> factored_;
};

/// A(t) + eps I.
CoefficientPath epsilon_regularize(const CoefficientPath& path, double eps);

/// max over samples of max_ij |a_ij(t)| / δ(t) with 0/0 := 0; +infinity when
/// some a_ij(t) ≠ 0 where δ(t) = 0.
double check_domination(const CoefficientPath& path, const DegeneracyProfile& profile,
                        const std::vector<double>& sample_times);

/// t ↦ λ_min(A(t)).
DegeneracyProfile min_eigenvalue_profile(const CoefficientPath& path, double horizon = 10.0);

/// min over samples and directions of ξᵀA(t)ξ - δ(t)|ξ|²; nonnegative when the floor holds.
double ellipticity_margin(const CoefficientPath& path, const DegeneracyProfile& profile,
                          const std::vector<double>& sample_times);

}  // namespace degenpar
