#pragma once

#include "degenpar/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>
#include <vector>

namespace degenpar {

/// Nodes and weights of the N-point Gauss–Legendre rule on [-1, 1].
template <typename Scalar, int N>
struct GaussLegendreRule {
    std::array<Scalar, N> nodes{};
    std::array<Scalar, N> weights{};
};

template <typename Scalar, int N>
const GaussLegendreRule<Scalar, N>& gauss_legendre() {
    static const GaussLegendreRule<Scalar, N> rule = [] {
        GaussLegendreRule<Scalar, N> r;
        using Wide = long double;
        for (int i = 0; i < N; ++i) {
            Wide x = std::cos(std::numbers::pi_v<Wide> * (i + 0.75L) / (N + 0.5L));
            Wide dp = 0;
            for (int it = 0; it < 100; ++it) {
                Wide p0 = 1, p1 = x;
                for (int k = 2; k <= N; ++k) {
                    const Wide p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N * (x * p1 - p0) / (x * x - 1);
                const Wide dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-19L) break;
            }
            r.nodes[static_cast<std::size_t>(i)] = static_cast<Scalar>(x);
            r.weights[static_cast<std::size_t>(i)] = static_cast<Scalar>(2 / ((1 - x * x) * dp * dp));
        }
        return r;
    }();
    return rule;
}

template <typename Scalar, int N = 16, typename F>
Scalar gauss_legendre_panel(F&& f, Scalar a, Scalar b) {
    const auto& rule = gauss_legendre<Scalar, N>();
    const Scalar mid = (a + b) / 2;
    const Scalar half = (b - a) / 2;
    Scalar sum = 0;
    for (int i = 0; i < N; ++i)
        sum += rule.weights[static_cast<std::size_t>(i)] * f(mid + half * rule.nodes[static_cast<std::size_t>(i)]);
    return sum * half;
}

struct QuadratureOptions {
    double abs_tol = 1e-13;
    double rel_tol = 1e-12;
    /// Width below which the geometric subdivision toward t = 0 stops.
    double innermost_panel = 1e-9;
    int max_intervals = 1 << 15;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

/// Panels [t 2^-(m+1), t 2^-m], m = 0..M, clipped to [s, t], plus the head
/// panel [0, t 2^-(M+1)] when s = 0. M is the first index whose panel is
/// narrower than `innermost`.
inline std::vector<double> geometric_breakpoints(double s, double t, double innermost) {
    std::vector<double> points{t};
    double x = t;
    while (x / 2 > s) {
        points.push_back(x / 2);
        if (x - x / 2 < innermost) break;
        x /= 2;
    }
    points.push_back(s);
    std::reverse(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

/// Globally adaptive Gauss–Legendre(16) quadrature of f over [s, t], seeded
/// with a geometric panel ladder refined toward the origin. Throws
/// NumericalError carrying the achieved error estimate when the interval
/// budget is exhausted.
template <typename F>
QuadratureResult integrate_from_origin_panels(F&& f, double s, double t,
                                              const QuadratureOptions& opts = {}) {
    if (!(s <= t)) throw DomainError("integrate: lower limit exceeds upper limit");
    QuadratureResult out;
    if (s == t) return out;

    struct Interval {
        double a, b, left, right, fine, err;
        bool operator<(const Interval& o) const { return err < o.err; }
    };
    auto make = [&](double a, double b, double coarse) {
        const double m = (a + b) / 2;
        const double l = gauss_legendre_panel<double>(f, a, m);
        const double r = gauss_legendre_panel<double>(f, m, b);
        return Interval{a, b, l, r, l + r, std::abs(l + r - coarse)};
    };

    std::priority_queue<Interval> heap;
    double total = 0.0;
    double total_err = 0.0;
    const auto points = geometric_breakpoints(s, t, opts.innermost_panel);
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        auto iv = make(points[i], points[i + 1], gauss_legendre_panel<double>(f, points[i], points[i + 1]));
        total += iv.fine;
        total_err += iv.err;
        heap.push(iv);
    }

    double frozen_err = 0.0;
    auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
    while (total_err + frozen_err > target() && static_cast<int>(heap.size()) < opts.max_intervals) {
        const Interval worst = heap.top();
        heap.pop();
        const double m = (worst.a + worst.b) / 2;
        if (!(worst.a < m && m < worst.b)) {
            // cannot bisect further in floating point; keep its error but stop selecting it
            frozen_err += worst.err;
            heap.push(Interval{worst.a, worst.b, worst.left, worst.right, worst.fine, 0.0});
            total_err -= worst.err;
            if (heap.top().err == 0.0) break;
            continue;
        }
        const auto left = make(worst.a, m, worst.left);
        const auto right = make(m, worst.b, worst.right);
        total += left.fine + right.fine - worst.fine;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
    }

    // re-sum to shed drift from the running updates
    std::vector<Interval> all;
    all.reserve(heap.size());
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
    total = 0.0;
    total_err = frozen_err;
    for (const auto& iv : all) {
        total += iv.fine;
        total_err += iv.err;
    }
    out.value = total;
    out.error = total_err;
    out.intervals = static_cast<int>(all.size());
    if (total_err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
        std::ostringstream msg;
        msg << "quadrature on [" << s << ", " << t << "] did not converge within " << opts.max_intervals
            << " intervals; achieved error estimate " << total_err;
        throw NumericalError(msg.str(), total_err);
    }
    return out;
}

}  // namespace degenpar
