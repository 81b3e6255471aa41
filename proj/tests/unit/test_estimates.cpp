#include "degenpar/errors.hpp"
#include "degenpar/estimates.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace degenpar;

namespace {

constexpr double pi = std::numbers::pi;

SpectralField sampled(const GridSpec& g, auto&& f) {
    const auto xs = coordinates(g);
    Eigen::ArrayXd v(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        Eigen::VectorXd x(g.dim);
        for (int a = 0; a < g.dim; ++a) x(a) = xs[static_cast<std::size_t>(a)](i);
        v(i) = f(x);
    }
    return SpectralField::from_samples(g, v);
}

SpectralField gaussian(const GridSpec& g, double var) {
    return sampled(g, [var](const Eigen::VectorXd& x) { return std::exp(-x.squaredNorm() / (2 * var)); });
}

CoefficientPath scalar_path(const ScalarPath& a, int d = 1) {
    return CoefficientPath::scalar_times(a, Eigen::MatrixXd::Identity(d, d));
}

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(a * std::pow(b / a, double(i) / (n - 1)));
    return v;
}

}  // namespace

TEST(WeightedNorm, ZeroWeightIsUnweighted) {
    const GridSpec g{1, 64, 10.0};
    const auto u0 = gaussian(g, 1.0);
    const auto part = TimePartition::geometric(8, 2.0);
    const auto r = solve_homogeneous(u0, scalar_path(constant_path(1.0)), part);
    const double w = weighted_norm(r.snapshots, part, {1.0, 3.0, 0.0, power_profile(1.0)});
    const auto tw = part.trapezoid_weights(part.size() - 1);
    double s = 0;
    for (std::size_t k = 0; k < part.size(); ++k) s += tw[k] * std::pow(bessel_norm(r.snapshots[k], 1.0, 3.0), 3.0);
    EXPECT_DOUBLE_EQ(w, std::cbrt(s));
}

TEST(WeightedNorm, ConstantIntegrands) {
    const GridSpec g{1, 64, 10.0};
    const auto u0 = gaussian(g, 1.0);
    const double norm = bessel_norm(u0, 0.5, 2.0);
    const auto part = TimePartition::uniform(7, 3.0);
    const std::vector<SpectralField> same(part.size(), u0);
    EXPECT_NEAR(weighted_norm(same, part, {0.5, 2.0, 1.0, constant_profile(1.0)}), std::sqrt(3.0) * norm, 1e-13);
    EXPECT_NEAR(weighted_norm(same, part, {0.5, 2.0, 1.0, power_profile(1.0)}), std::sqrt(4.5) * norm, 1e-13);
    EXPECT_NEAR(weighted_norm(same, part, {0.5, 4.0, 1.0, power_profile(1.0)}), std::pow(4.5, 0.25) * bessel_norm(u0, 0.5, 4.0),
                1e-13);
}

TEST(WeightedNorm, ZeroTimesInfinityAndInfinityFlag) {
    const GridSpec g{1, 32, 4.0};
    const auto u0 = gaussian(g, 0.2);
    const auto part = TimePartition::uniform(4, 1.0);
    std::vector<SpectralField> same(part.size(), u0);
    EXPECT_TRUE(std::isinf(weighted_norm(same, part, {0.0, 2.0, -1.0, power_profile(1.0)})));
    // vanishing norm where δ = 0 is fine even for negative powers
    same[0] = SpectralField::zero(g);
    EXPECT_TRUE(std::isfinite(weighted_norm(same, part, {0.0, 2.0, -1.0, power_profile(1.0)})));
    EXPECT_EQ(weighted_norm(same, part, {0.0, 2.0, 1.0, constant_profile(0.0)}), 0.0);
    EXPECT_THROW(weighted_norm(same, part, {0.0, 1.0, 1.0, power_profile(1.0)}), DomainError);
}

TEST(WeightedNorm, NonincreasingInWeightPowerForBoundedProfile) {
    const GridSpec g{1, 64, 10.0};
    const auto u0 = gaussian(g, 1.0);
    const auto part = TimePartition::geometric(20, 1.0);
    const auto path = scalar_path(oscillatory_profile().delta());
    const auto r = solve_homogeneous(u0, path, part);
    const auto prof = expression_profile("0.25 + 0.5*sin(5*t)^2");  // δ ≤ 1
    double prev = INFINITY;
    for (double m : {-0.5, 0.0, 0.5, 1.0, 2.0}) {
        const double w = weighted_norm(r.snapshots, part, {0.0, 2.0, m, prof});
        EXPECT_LE(w, prev * (1 + 1e-14));
        prev = w;
    }
}

TEST(Thm1, ZeroCoefficientsGiveZeroLhs) {
    const GridSpec g{1, 64, 10.0};
    const auto r = check_thm1(gaussian(g, 1.0), Forcing{}, scalar_path(constant_path(0.0)), constant_profile(0.0),
                              0.0, 2.0, TimePartition::uniform(4, 1.0));
    EXPECT_EQ(r.lhs, 0.0);
    EXPECT_EQ(r.ratio, 0.0);
    EXPECT_TRUE(r.admissible);
}

TEST(Thm1, HeatRatioStableUnderRefinement) {
    std::vector<double> ratios;
    for (int n : {256, 512}) {
        const GridSpec g{1, n, 20.0};
        const auto r = check_thm1(gaussian(g, 1.0), Forcing{}, scalar_path(constant_path(1.0)), constant_profile(1.0),
                                  0.0, 2.0, TimePartition::geometric(40, 1.0));
        EXPECT_TRUE(std::isfinite(r.ratio));
        EXPECT_GT(r.ratio, 0.0);
        ratios.push_back(r.ratio);
    }
    EXPECT_NEAR(ratios[1] / ratios[0], 1.0, 0.1);
}

TEST(Thm1, RatioInvariantUnderScaling) {
    const GridSpec g{1, 128, 10.0};
    const auto u0 = gaussian(g, 1.0);
    const auto shape = gaussian(g, 0.5);
    const auto path = scalar_path(expression_path("t + 0.2"));
    const auto prof = expression_profile("t + 0.2");
    Forcing f = [shape](double s) { return (1 + s) * shape; };
    const auto part = TimePartition::uniform(16, 1.0);
    const auto base = check_thm1(u0, f, path, prof, 0.0, 2.0, part);
    const double lambda = 37.5;
    Forcing fl = [shape, lambda](double s) { return lambda * (1 + s) * shape; };
    const auto scaled = check_thm1(lambda * u0, fl, path, prof, 0.0, 2.0, part);
    EXPECT_NEAR(scaled.ratio, base.ratio, 1e-10 * base.ratio);
}

TEST(Thm1, ForcingNotVanishingWhereDeltaDoesIsInadmissible) {
    const GridSpec g{1, 64, 10.0};
    const auto shape = gaussian(g, 0.5);
    Forcing f = [shape](double) { return shape; };
    const auto r = check_thm1(gaussian(g, 1.0), f, scalar_path(expression_path("t")), power_profile(1.0), 0.0, 2.0,
                              TimePartition::uniform(8, 1.0));
    EXPECT_FALSE(r.admissible);
    EXPECT_TRUE(std::isnan(r.ratio));
}

TEST(Thm1, EpsilonSweepUniformForLinearProfile) {
    const GridSpec g{1, 256, 20.0};
    const auto u0 = gaussian(g, 1.0);
    const auto reps = epsilon_sweep(u0, Forcing{}, scalar_path(expression_path("t")), power_profile(1.0),
                                    {1e-1, 1e-2, 1e-3, 1e-4}, 0.0, 2.0, TimePartition::geometric(60, 1.0));
    ASSERT_EQ(reps.size(), 4u);
    for (const auto& r : reps) {
        EXPECT_TRUE(std::isfinite(r.ratio));
        EXPECT_LE(r.ratio, 2.0 * reps[0].ratio);
        EXPECT_GE(r.ratio, 0.5 * reps[0].ratio);
    }
}

TEST(Thm1, EpsilonSweepEllipticIsFlat) {
    const GridSpec g{1, 128, 20.0};
    const auto reps = epsilon_sweep(gaussian(g, 1.0), Forcing{}, scalar_path(constant_path(1.0)), constant_profile(1.0),
                                    {1e-3, 1e-4, 1e-5}, 0.0, 2.0, TimePartition::geometric(30, 1.0));
    for (const auto& r : reps) EXPECT_NEAR(r.ratio / reps.back().ratio, 1.0, 2e-3);
}

TEST(Thm1, EpsilonSweepSingleModeClosedForm) {
    const GridSpec g{1, 64, 2 * pi};
    const double xi = 2.0, T = 1.0;
    const auto u0 = sampled(g, [xi](const Eigen::VectorXd& x) { return std::cos(xi * x(0)); });
    const auto reps = epsilon_sweep(u0, Forcing{}, scalar_path(constant_path(0.0)), constant_profile(0.0),
                                    {1e-1, 1e-2}, 0.0, 2.0, TimePartition::uniform(400, T));
    for (const auto& r : reps) {
        const double eps = r.echo.at("eps");
        // ∫_0^T ε ξ⁴ e^{-2εξ²t} (L/2) dt
        const double exact = std::sqrt(xi * xi * (2 * pi / 4) * (1 - std::exp(-2 * eps * xi * xi * T)));
        EXPECT_NEAR(r.lhs, exact, 1e-5 * exact);
    }
    EXPECT_THROW(epsilon_sweep(u0, Forcing{}, scalar_path(constant_path(0.0)), constant_profile(0.0), {1e-2, 1e-1},
                               0.0, 2.0, TimePartition::uniform(4, T)),
                 ValidationError);
}

TEST(Thm2, HeatCaseFiniteAndStable) {
    const auto prof = constant_profile(1.0);
    const auto fit = fit_beta_exponent(prof, 0.5, logspace(1e-6, 1e-2, 10));
    EXPECT_NEAR(fit.beta_hat, 1.0, 0.02);
    std::vector<double> ratios;
    for (int n : {256, 512}) {
        const GridSpec g{1, n, 20.0};
        const auto r = check_thm2(gaussian(g, 0.5), scalar_path(constant_path(1.0)), prof, 2.0, {fit, 0.5},
                                  TimePartition::geometric(60, 1.0));
        ASSERT_TRUE(r.admissible);
        EXPECT_TRUE(std::isfinite(r.lhs));
        ratios.push_back(r.ratio);
        EXPECT_EQ(r.echo.at("beta"), fit.beta_hat);
        EXPECT_NEAR(r.echo.at("int_delta_t0"), 0.5, 1e-14);
        EXPECT_EQ(r.echo.at("Nbar0"), 1.0);
    }
    EXPECT_NEAR(ratios[1] / ratios[0], 1.0, 0.1);
}

TEST(Thm2, LinearProfileStable) {
    const auto prof = power_profile(1.0);
    const auto fit = fit_beta_exponent(prof, 0.5, logspace(1e-7, 1e-3, 12));
    EXPECT_NEAR(fit.beta_hat, 2.0, 0.04);
    std::vector<double> ratios;
    for (int n : {256, 512}) {
        const GridSpec g{1, n, 20.0};
        const auto r = check_thm2(gaussian(g, 0.5), scalar_path(power_profile(1.0).delta()), prof, 2.0, {fit, 0.5},
                                  TimePartition::geometric(60, 1.0));
        ASSERT_TRUE(r.admissible);
        EXPECT_NEAR(r.echo.at("besov_s"), 2.0 * (1 - 1 / (2 * fit.beta_hat)), 1e-15);
        ratios.push_back(r.ratio);
    }
    EXPECT_NEAR(ratios[1] / ratios[0], 1.0, 0.15);
}

TEST(Thm2, FailedAssumptionsAreInadmissible) {
    const GridSpec g{1, 64, 10.0};
    const auto prof = power_profile(1.0);
    BetaFit bad{std::numeric_limits<double>::quiet_NaN(), 1.0, 0.0};
    auto r = check_thm2(gaussian(g, 1.0), scalar_path(expression_path("t")), prof, 2.0, {bad, 0.5},
                        TimePartition::uniform(4, 1.0));
    EXPECT_FALSE(r.admissible);
    // a_11 = 1 is not dominated by δ = t near 0
    const auto fit = fit_beta_exponent(prof, 0.5, logspace(1e-7, 1e-3, 12));
    r = check_thm2(gaussian(g, 1.0), scalar_path(constant_path(1.0)), prof, 2.0, {fit, 0.5},
                   TimePartition::uniform(4, 1.0));
    EXPECT_FALSE(r.admissible);
    EXPECT_NE(to_csv_row(r).find("domination_infinite"), std::string::npos);
}

TEST(Classic, ZeroCoefficientsRatioOne) {
    const GridSpec g{1, 64, 10.0};
    const auto u0 = gaussian(g, 1.0);
    const auto rep = solve_homogeneous(u0, scalar_path(constant_path(0.0)), TimePartition::uniform(5, 1.0));
    const auto r = check_classic(rep, Forcing{}, u0, 3.0);
    EXPECT_NEAR(r.lhs, lp_norm(u0, 3.0), 1e-15);
    EXPECT_NEAR(r.ratio, 1.0, 1e-14);
}

TEST(Classic, HeatContractionForPTwo) {
    const GridSpec g{2, 32, 2 * pi};
    const auto u0 = sampled(g, [](const Eigen::VectorXd& x) { return std::sin(x(0)) + std::cos(3 * x(1)) + 0.1; });
    const auto rep = solve_homogeneous(u0, scalar_path(constant_path(1.0), 2), TimePartition::uniform(6, 1.0));
    EXPECT_LE(check_classic(rep, Forcing{}, u0, 2.0).ratio, 1.0 + 1e-14);
}

TEST(Classic, ConstantForcingGrowsLinearly) {
    const GridSpec g{1, 32, 4.0};
    const double c = 0.7;
    Forcing f = [g, c](double) { return SpectralField::from_samples(g, Eigen::ArrayXd::Constant(g.size(), c)); };
    for (double T : {0.5, 2.0}) {
        for (double p : {2.0, 3.0}) {
            const auto rep = solve_duhamel(SpectralField::zero(g), f, scalar_path(constant_path(1.0)),
                                           TimePartition::uniform(10, T));
            const auto r = check_classic(rep, f, SpectralField::zero(g), p);
            EXPECT_NEAR(r.lhs, T * c * std::pow(4.0, 1 / p), 1e-12);
            EXPECT_NEAR(r.ratio, std::pow(T, 1 - 1 / p), 1e-12);
        }
    }
}

TEST(KernelDecay, HeatCaseRateAndCertificate) {
    const GridSpec g{1, 1024, 8.0};
    const auto fit = check_kernel_decay(scalar_path(constant_path(1.0)), constant_profile(1.0), 0.0, {1, 2, 3, 4, 5, 6},
                                        logspace(1e-4, 1.0, 8), g);
    EXPECT_TRUE(fit.violations.empty());
    EXPECT_GT(fit.c_hat, 0.25 / 5);
    EXPECT_LT(fit.c_hat, 0.25 * 5);
    EXPECT_GT(fit.n_hat, 0.0);
    // certificate as stated: for each sample, mass ≤ N 2^{kγ} e^{-cβ4^k}
    for (const auto& s : fit.samples)
        if (!s.below_noise_floor) EXPECT_LE(s.mass, fit.n_hat * std::exp(-fit.c_hat * s.beta * std::pow(4.0, s.k)) * (1 + 1e-10));
}

TEST(KernelDecay, SmallTimeMassApproachesBlockMass) {
    const GridSpec g{1, 1024, 8.0};
    const auto fam = LPFamily::for_grid(g);
    for (int k : {1, 3, 5}) {
        const double limit = kernel_block_mass(Eigen::MatrixXd::Zero(1, 1), g, k, 0.0, fam);
        EXPECT_TRUE(std::isfinite(limit));
        EXPECT_GT(limit, 0.0);
        const double small = kernel_block_mass(Eigen::MatrixXd::Constant(1, 1, 1e-10), g, k, 0.0, fam);
        EXPECT_NEAR(small, limit, 1e-6 * limit);
    }
}

TEST(KernelDecay, GammaOneAndOscillatoryProfile) {
    const GridSpec g{1, 1024, 8.0};
    const auto prof = oscillatory_profile();
    const auto fit = check_kernel_decay(scalar_path(prof.delta()), prof, 1.0, {1, 2, 3, 4, 5, 6},
                                        logspace(1e-3, 1.0, 8), g);
    EXPECT_TRUE(fit.violations.empty());
    EXPECT_GT(fit.c_hat, 0.0);
    EXPECT_THROW(check_kernel_decay(scalar_path(prof.delta()), prof, 1.0, {}, {0.1}, g), ValidationError);
    EXPECT_THROW(check_kernel_decay(scalar_path(prof.delta()), prof, 1.0, {20}, {0.1}, g), DomainError);
    EXPECT_THROW(check_kernel_decay(scalar_path(expression_path("t")), power_profile(1.0), 0.0, {1}, {0.0}, g),
                 PreconditionViolation);
}

TEST(EstimateCsv, RowShape) {
    EstimateReport r;
    r.theorem = "thm1";
    r.profile_spec = "piecewise([(0.5,\"t\"),(1,\"1\")])";
    r.rhs = {{"a", 1.0}, {"b", 2.0}};
    r.lhs = 1.5;
    finalize_ratio(r);
    EXPECT_DOUBLE_EQ(r.ratio, 0.5);
    const std::string row = to_csv_row(r);
    EXPECT_NE(row.find("\"piecewise([(0.5,\"\"t\"\"),(1,\"\"1\"\")])\""), std::string::npos);
    EXPECT_EQ(estimate_csv_header(), "theorem,n,p,m,profile_spec,grid_n,K,lhs,rhs_1,rhs_2,ratio,flags");
}
