#pragma once

namespace degenpar {

/// Cosine integral Ci(x) = -∫_x^∞ cos(u)/u du for x > 0.
double cosine_integral(double x);

}  // namespace degenpar
