#include "degenpar/special_functions.hpp"

#include "degenpar/errors.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace degenpar {

double cosine_integral(double x) {
    if (!(x > 0.0)) throw DomainError("cosine_integral: argument must be positive");
    constexpr double eps = 4.0 * std::numeric_limits<double>::epsilon();
    if (x <= 2.0) {
        // Ci(x) = γ + ln x + Σ_k (-x²)^k / (2k (2k)!)
        const double x2 = x * x;
        double sum = 0.0;
        double term = 1.0;  // (-x²)^k / (2k)!
        for (int k = 1; k < 100; ++k) {
            term *= -x2 / ((2.0 * k - 1.0) * (2.0 * k));
            const double add = term / (2.0 * k);
            sum += add;
            if (std::abs(add) < eps * std::abs(sum)) break;
        }
        return std::numbers::egamma + std::log(x) + sum;
    }
    // E1(ix) by continued fraction (modified Lentz); Ci(x) = -Re E1(ix)
    using C = std::complex<double>;
    constexpr double tiny = 1e-300;
    C b(1.0, x);
    C c(1.0 / tiny, 0.0);
    C d = 1.0 / b;
    C h = d;
    for (int i = 2; i < 100000; ++i) {
        const double a = -static_cast<double>((i - 1) * (i - 1));
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const C del = c * d;
        h *= del;
        if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < eps) break;
    }
    h *= C(std::cos(x), -std::sin(x));
    return -h.real();
}

}  // namespace degenpar
