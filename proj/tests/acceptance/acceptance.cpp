// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include "degenpar/cli.hpp"
#include "degenpar/degeneracy.hpp"
#include "degenpar/estimates.hpp"
#include "degenpar/initial_data.hpp"
#include "degenpar/oracle.hpp"
#include "degenpar/solver.hpp"
#include "degenpar/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace degenpar;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

std::vector<double> logspace(double a, double b, int count) {
    std::vector<double> v;
    for (int i = 0; i < count; ++i)
        v.push_back(std::exp(std::log(a) + (std::log(b) - std::log(a)) * i / (count - 1)));
    return v;
}

CoefficientPath isotropic(const DegeneracyProfile& profile, int dim = 1) {
    return CoefficientPath::scalar_times(profile.delta(), Eigen::MatrixXd::Identity(dim, dim));
}

double max_abs(const SpectralField& u) { return u.samples().abs().maxCoeff(); }

// ------------------------------------------------------------------ criteria

Outcome heat_benchmark() {
    const GridSpec g{1, 1024, 40.0};
    const double sigma = 1.0;
    const auto u0 = gaussian_data(g, sigma);
    const auto part = TimePartition::uniform(8, 1.0);
    const auto r = solve_homogeneous(u0, isotropic(constant_profile(1.0)), part, {2.0, false, {}});
    const Eigen::ArrayXd x = coordinates(g)[0];
    double worst = 0.0;
    for (std::size_t k = 0; k < part.size(); ++k) {
        const double v = sigma * sigma + 2.0 * part[k];
        const Eigen::ArrayXd exact = sigma / std::sqrt(v) * (-x.square() / (2.0 * v)).exp();
        worst = std::max(worst, (r.snapshots[k].samples() - exact).abs().maxCoeff() / exact.abs().maxCoeff());
    }
    return {worst < 1e-8, "max relative Linf error " + fmt(worst) + " (< 1e-8)"};
}

Outcome kernel_mass() {
    const GridSpec g{1, 1024, 16.0};
    double worst = 0.0;
    for (const auto& profile : {constant_profile(1.0), power_profile(1.0), oscillatory_profile()}) {
        for (double t : logspace(1e-3, 2.0, 8)) {
            if (!(cumulative_delta(profile, t) > 0.0)) return {false, "beta(t) = 0 at a sample time"};
            worst = std::max(worst, std::abs(grid_integral(kernel(isotropic(profile), t, g)) - 1.0));
        }
    }
    return {worst <= 1e-6, "max |mass - 1| " + fmt(worst) + " (<= 1e-6)"};
}

SpectralField random_band_limited(const GridSpec& g, std::mt19937_64& rng) {
    const LPFamily fam = LPFamily::for_grid(g);
    const Wavevectors w = wavevectors(g);
    const double cutoff = std::ldexp(1.0, fam.j_max);
    std::normal_distribution<double> normal;
    Eigen::ArrayXcd spec(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i)
        spec(i) = std::sqrt(w.norm2(i)) <= cutoff ? std::complex<double>(normal(rng), normal(rng)) : 0.0;
    const auto u = SpectralField::from_spectrum(g, spec);
    return (1.0 / max_abs(u)) * u;
}

Outcome littlewood_paley() {
    std::mt19937_64 rng(20240611);
    double worst = 0.0, defect = 0.0;
    const GridSpec grids[] = {{1, 512, 2 * M_PI}, {2, 64, 2 * M_PI}};
    for (int i = 0; i < 20; ++i) {
        const GridSpec& g = grids[i % 2];
        const LPFamily fam = LPFamily::for_grid(g);
        const auto u = random_band_limited(g, rng);
        SpectralField rest = u - s0_block(u, fam);
        for (int j = 1; j <= fam.j_max; ++j) rest = rest - lp_block(u, j, fam);
        worst = std::max(worst, max_abs(rest));
    }
    for (const auto& g : grids) defect = std::max(defect, partition_of_unity_defect(LPFamily::for_grid(g), g));
    return {worst < 1e-10 && defect < 1e-12,
            "reconstruction " + fmt(worst) + " (< 1e-10), partition-of-unity defect " + fmt(defect) + " (< 1e-12)"};
}

Outcome time_change() {
    const GridSpec g{1, 512, 20.0};
    const auto profile = expression_profile("t + 0.1");
    const auto path = isotropic(profile);
    const auto u0 = gaussian_data(g, 0.8);
    const auto part = TimePartition::uniform(8, 1.0);
    const auto direct = solve_homogeneous(u0, path, part, {2.0, false, {}});
    const auto changed = time_change_solve(u0, Forcing{}, path, profile, part, {2.0, false, {}});
    double worst = 0.0;
    for (std::size_t k = 1; k < part.size(); ++k)
        worst = std::max(worst, max_abs(direct.snapshots[k] - changed.snapshots[k]));
    return {worst < 1e-8, "max Linf difference over 8 snapshots " + fmt(worst) + " (< 1e-8)"};
}

Outcome oracle_triangle() {
    const auto profile = oscillatory_profile();
    const auto path = isotropic(profile);
    const double horizon = 0.5;
    std::ostringstream detail;

    // finite differences, joint refinement of h and Δt
    std::vector<double> errors;
    const int levels[] = {64, 128, 256};
    for (int n : levels) {
        const GridSpec g{1, n, 2 * M_PI};
        const auto u0 = gaussian_data(g, 0.4);
        const auto part = TimePartition::uniform(n / 2, horizon);
        const auto fd = fd_solve(u0, Forcing{}, path, {part, 0.5, CoefficientSampling::StepAverage}, {2.0, false, {}});
        const auto sp = solve_homogeneous(u0, path, part, {2.0, false, {}});
        errors.push_back(compare_fields(sp.snapshots.back(), fd.snapshots.back(), 2.0));
    }
    const double order_coarse = std::log2(errors[0] / errors[1]);
    const double order = std::log2(errors[1] / errors[2]);
    detail << "fd order " << fmt(order_coarse) << ", " << fmt(order) << " (finest >= 1.9)";

    // Monte Carlo at 5 probes
    const GridSpec g{1, 1024, 2 * M_PI};
    const auto u0 = gaussian_data(g, 0.4);
    const auto part = TimePartition::uniform(64, horizon);
    const auto sp = solve_homogeneous(u0, path, part, {2.0, false, {}});
    std::vector<Eigen::VectorXd> probes;
    for (double x : {-0.6, -0.3, 0.0, 0.3, 0.6}) probes.push_back(Eigen::VectorXd::Constant(1, x));
    const auto mc = mc_solve(u0, Forcing{}, path, part, probes, {100000, 7, 1, {}});
    double worst_mc = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        worst_mc = std::max(worst_mc,
                            std::abs(mc.mean(k) - evaluate_spectral(sp.snapshots.back(), probes[i])) / mc.standard_error(k));
    }
    detail << "; mc worst z " << fmt(worst_mc) << " (<= 3)";

    // characteristic function of X_T at 10 frequencies
    const double b = path.accumulate(0.0, horizon)(0, 0);
    std::vector<Eigen::VectorXd> freqs;
    for (int i = 1; i <= 10; ++i) freqs.push_back(Eigen::VectorXd::Constant(1, std::sqrt(0.2 * i / b)));
    double worst_cf = 0.0;
    for (const auto& ch : characteristic_function_check(path, part, 0, part.size() - 1, freqs, {100000, 8, 1, {}}))
        worst_cf = std::max(worst_cf, ch.z_score());
    detail << "; charfun worst z " << fmt(worst_cf) << " (<= 4)";
    return {order >= 1.9 && worst_mc <= 3.0 && worst_cf <= 4.0, detail.str()};
}

Outcome kernel_decay() {
    const GridSpec g{1, 1024, 16.0};
    std::vector<int> ks{1, 2, 3, 4, 5, 6};
    const auto ts = logspace(1e-3, 1.0, 8);
    std::size_t violations = 0;
    double min_c = INFINITY;
    for (const auto& profile : {constant_profile(1.0), power_profile(1.0), oscillatory_profile()}) {
        for (double gamma : {0.0, 1.0}) {
            const auto fit = check_kernel_decay(isotropic(profile), profile, gamma, ks, ts, g);
            violations += fit.violations.size();
            min_c = std::min(min_c, fit.c_hat);
        }
    }
    return {violations == 0 && min_c > 0.0,
            std::to_string(violations) + " violations over 6 fits, smallest c " + fmt(min_c) + " (> 0)"};
}

Outcome thm1_stability() {
    const auto profile = power_profile(1.0);
    const auto path = isotropic(profile);
    std::ostringstream detail;
    bool pass = true;
    for (double p : {2.0, 4.0}) {
        auto ratio = [&](int n, int intervals) {
            const GridSpec g{1, n, 16.0};
            const auto shape = gaussian_data(g, 1.0);
            const Forcing f = [shape](double t) { return t * shape; };
            return check_thm1(gaussian_data(g, 0.7), f, path, profile, 0.0, p,
                              TimePartition::geometric(intervals, 1.0)).ratio;
        };
        const double base = ratio(256, 64);
        const double grid_change = std::abs(ratio(512, 64) / base - 1.0);
        const double time_change = std::abs(ratio(256, 128) / base - 1.0);

        const GridSpec g{1, 256, 16.0};
        const auto shape = gaussian_data(g, 1.0);
        const Forcing f = [shape](double t) { return t * shape; };
        const auto sweep = epsilon_sweep(gaussian_data(g, 0.7), f, path, profile, {1e-1, 1e-2, 1e-3, 1e-4}, 0.0, p,
                                         TimePartition::geometric(64, 1.0));
        double spread = 1.0;
        for (const auto& r : sweep) {
            const double q = r.ratio / sweep.front().ratio;
            spread = std::max({spread, q, 1.0 / q});
        }
        pass = pass && std::isfinite(base) && grid_change < 0.1 && time_change < 0.1 && spread <= 2.0;
        detail << (p == 2.0 ? "" : "; ") << "p=" << p << ": ratio " << fmt(base) << ", n->2n " << fmt(grid_change)
               << ", K->2K " << fmt(time_change) << " (< 0.1), eps spread " << fmt(spread) << " (<= 2)";
    }
    return {pass, detail.str()};
}

Outcome thm2_family() {
    const GridSpec g{1, 512, 2 * M_PI};
    const auto profile = oscillatory_profile();
    const auto path = isotropic(profile);
    const auto part = TimePartition::geometric(128, 0.5);
    const Thm2Inputs inputs{fit_beta_exponent(profile, 0.5, logspace(1e-7, 1e-3, 12)), 0.5};
    double lo = INFINITY, hi = 0.0;
    bool finite = true;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto r = check_thm2(rough_data(g, {1.0, 2.0, seed, -1}), path, profile, 2.0, inputs, part);
        finite = finite && std::isfinite(r.lhs) && r.admissible;
        lo = std::min(lo, r.ratio);
        hi = std::max(hi, r.ratio);
    }
    return {finite && hi / lo < 5.0, std::string(finite ? "finite lhs for all five" : "non-finite lhs") +
                                         ", max/min ratio " + fmt(hi / lo) + " (< 5)"};
}

Outcome degeneracy_fits() {
    const auto hs = logspace(1e-7, 1e-3, 12);
    std::ostringstream detail;
    bool pass = true;
    for (double alpha : {0.0, 1.0, 2.0}) {
        const double b = fit_beta_exponent(power_profile(alpha), 0.5, hs).beta_hat;
        const double err = std::abs(b / (alpha + 1.0) - 1.0);
        pass = pass && err < 0.02;
        detail << "alpha=" << alpha << " beta " << fmt(b) << "; ";
    }
    const auto osc = oscillatory_profile();
    const double b = fit_beta_exponent(osc, 0.5, hs).beta_hat;
    pass = pass && std::abs(b - 1.0) < 0.1;
    double lo = INFINITY, hi = 0.0;
    for (int i = 1; i <= 1000; ++i) {
        const double t = i / 1000.0;
        const double q = cumulative_delta(osc, t) / t;
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    pass = pass && lo >= 0.25 && hi <= 2.0;
    detail << "oscillatory beta " << fmt(b) << "; beta(t)/t in [" << fmt(lo) << ", " << fmt(hi) << "] (within [0.25, 2])";
    return {pass, detail.str()};
}

Outcome degenerate_limit() {
    const GridSpec g{1, 256, 16.0};
    const auto zero = constant_profile(0.0);
    const auto path = isotropic(zero);
    const auto u0 = gaussian_data(g, 1.0);
    const auto shape = mode_data(g, {3});
    const auto part = TimePartition::geometric(64, 1.0);

    // affine in t: the trapezoid rule is exact, so compare with the exact antiderivative
    const Forcing affine = [shape](double t) { return (1.0 + 2.0 * t) * shape; };
    const auto ra = solve_duhamel(u0, affine, path, part, {2.0, false, {}});
    double exact_err = 0.0;
    for (std::size_t k = 0; k < part.size(); ++k) {
        const double t = part[k];
        exact_err = std::max(exact_err, max_abs(ra.snapshots[k] - (u0 + (t + t * t) * shape)));
    }

    // cubic in t: compare with u0 plus the same time quadrature of f alone
    const Forcing cubic = [shape](double t) { return (1.0 - t + 3.0 * t * t * t) * shape; };
    const auto rc = solve_duhamel(u0, cubic, path, part, {2.0, false, {}});
    double quad_err = 0.0, cubic_vs_exact = 0.0;
    for (std::size_t k = 0; k < part.size(); ++k) {
        const auto w = part.trapezoid_weights(k);
        double integral = 0.0;
        for (std::size_t i = 0; i <= k; ++i) integral += w[i] * (1.0 - part[i] + 3.0 * std::pow(part[i], 3));
        quad_err = std::max(quad_err, max_abs(rc.snapshots[k] - (u0 + integral * shape)));
        const double t = part[k];
        cubic_vs_exact =
            std::max(cubic_vs_exact, max_abs(rc.snapshots[k] - (u0 + (t - 0.5 * t * t + 0.75 * std::pow(t, 4)) * shape)));
    }

    const auto thm1 = check_thm1(u0, Forcing{}, path, zero, 0.0, 2.0, part);
    return {exact_err < 1e-10 && quad_err < 1e-10 && thm1.lhs == 0.0,
            "affine forcing vs exact " + fmt(exact_err) + ", cubic forcing vs trapezoid " + fmt(quad_err) +
                " (< 1e-10; vs exact integral " + fmt(cubic_vs_exact) + "), thm1 lhs " + fmt(thm1.lhs) + " (= 0)"};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"heat benchmark", heat_benchmark},
        {"kernel mass", kernel_mass},
        {"Littlewood-Paley reconstruction", littlewood_paley},
        {"time-change equivalence", time_change},
        {"oracle triangle", oracle_triangle},
        {"kernel decay", kernel_decay},
        {"weighted estimate ratio stability", thm1_stability},
        {"rough-data family on oscillatory profile", thm2_family},
        {"degeneracy fits", degeneracy_fits},
        {"degenerate limit", degenerate_limit},
    };
    int failed = 0, index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    std::printf("%d of %d criteria passed\n", index - failed, index);
    return failed == 0 ? 0 : 1;
}
