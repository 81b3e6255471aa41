#include "degenpar/quadrature.hpp"
#include "degenpar/special_functions.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace degenpar;

TEST(GaussLegendre, ExactForDegree31) {
    auto f = [](double x) { return std::pow(x, 31) + 3.0 * std::pow(x, 30) - x; };
    // ∫_0^1 = 1/32 + 3/31 - 1/2
    EXPECT_NEAR(gauss_legendre_panel<double>(f, 0.0, 1.0), 1.0 / 32 + 3.0 / 31 - 0.5, 1e-15);
    const auto& rule = gauss_legendre<double, 16>();
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    EXPECT_NEAR(wsum, 2.0, 1e-15);
}

TEST(GeometricPanels, LadderReachesInnermostWidth) {
    const auto pts = geometric_breakpoints(0.0, 1.0, 1e-9);
    ASSERT_GE(pts.size(), 3u);
    EXPECT_EQ(pts.front(), 0.0);
    EXPECT_EQ(pts.back(), 1.0);
    EXPECT_LT(pts[2] - pts[1], 1e-9);
    for (std::size_t i = 2; i + 1 < pts.size(); ++i) EXPECT_DOUBLE_EQ(pts[i + 1], 2.0 * pts[i]);

    const auto clipped = geometric_breakpoints(0.3, 1.0, 1e-9);
    EXPECT_EQ(clipped, (std::vector<double>{0.3, 0.5, 1.0}));
}

TEST(AdaptiveQuadrature, SmoothAndEndpointSingular) {
    auto r = integrate_from_origin_panels([](double x) { return std::exp(x); }, 0.0, 2.0);
    EXPECT_NEAR(r.value, std::exp(2.0) - 1.0, 1e-12);
    // integrable singularity at the origin
    auto s = integrate_from_origin_panels([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                                          {.abs_tol = 1e-9, .rel_tol = 1e-9});
    EXPECT_NEAR(s.value, 2.0, 1e-7);
    EXPECT_EQ(integrate_from_origin_panels([](double) { return 1.0; }, 0.5, 0.5).value, 0.0);
    EXPECT_THROW(integrate_from_origin_panels([](double) { return 1.0; }, 1.0, 0.5), DomainError);
}

TEST(AdaptiveQuadrature, BudgetExhaustionCarriesAchievedError) {
    QuadratureOptions tight;
    tight.max_intervals = 64;
    try {
        integrate_from_origin_panels([](double x) { return std::sin(1.0 / x); }, 0.0, 1.0, tight);
        FAIL() << "expected non-convergence";
    } catch (const NumericalError& e) {
        EXPECT_GT(e.achieved_tolerance(), tight.abs_tol);
    }
}

// reference values: mpmath.ci at 30 digits
TEST(CosineIntegral, MatchesReferenceValues) {
    const std::pair<double, double> table[] = {
        {0.5, -0.177784078806612901335810271071}, {1.0, 0.337403922900968134662646203889},
        {2.0, 0.422980828774864995698565153198},  {2.5, 0.285871196365383495389100647925},
        {3.0, 0.119629786008000327626472281177},  {10.0, -0.0454564330044553726345328299526},
        {100.0, -0.00514882514261049214444355390534}, {1e4, -0.0000305519167244852126652024585989},
    };
    for (auto [x, ci] : table) EXPECT_NEAR(cosine_integral(x), ci, 1e-14 * std::max(1.0, std::abs(ci))) << x;
    EXPECT_THROW(cosine_integral(0.0), DomainError);
}
