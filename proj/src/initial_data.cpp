#include "degenpar/initial_data.hpp"

#include "degenpar/errors.hpp"
#include "degenpar/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>

namespace degenpar {

SpectralField gaussian_data(const GridSpec& grid, double sigma) {
    grid.validate();
    if (!(sigma > 0.0)) throw ValidationError("gaussian data needs sigma > 0");
    Eigen::ArrayXd r2 = Eigen::ArrayXd::Zero(grid.size());
    for (const auto& x : coordinates(grid)) r2 += x.square();
    return SpectralField::from_samples(grid, (-r2 / (2 * sigma * sigma)).exp());
}

SpectralField mode_data(const GridSpec& grid, const std::vector<int>& k) {
    grid.validate();
    if (k.empty() || k.size() > static_cast<std::size_t>(grid.dim))
        throw ValidationError("mode data needs between 1 and d wavenumbers");
    const auto xs = coordinates(grid);
    Eigen::ArrayXd phase = Eigen::ArrayXd::Zero(grid.size());
    for (std::size_t a = 0; a < k.size(); ++a) {
        if (2 * std::abs(k[a]) >= grid.n) throw ValidationError("mode wavenumber at or beyond Nyquist");
        phase += (2 * std::numbers::pi * k[a] / grid.length) * xs[a];
    }
    return SpectralField::from_samples(grid, phase.cos());
}

SpectralField rough_data(const GridSpec& grid, const RoughSpec& spec) {
    const LPFamily fam = LPFamily::for_grid(grid);
    const int top = spec.j_max < 0 ? fam.j_max : spec.j_max;
    if (top > fam.j_max)
        throw ValidationError("rough data scale " + std::to_string(top) + " exceeds the grid's maximum admissible scale " +
                              std::to_string(fam.j_max));
    if (top < 1) throw ValidationError("rough data needs at least one scale");
    if (!(spec.p >= 1.0)) throw ValidationError("rough data needs p >= 1");

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> offset(-0.25 * grid.length, 0.25 * grid.length);
    const Wavevectors w = wavevectors(grid);
    SpectralField u = SpectralField::zero(grid);
    for (int j = 1; j <= top; ++j) {
        const double sign = (rng() & 1u) ? 1.0 : -1.0;
        Eigen::ArrayXd shift = Eigen::ArrayXd::Zero(grid.size());
        for (int a = 0; a < grid.dim; ++a) shift += offset(rng) * w.component[static_cast<std::size_t>(a)];
        const Eigen::ArrayXcd spec_j =
            fam.block_symbol(j, w).cast<std::complex<double>>() *
            (std::complex<double>(0.0, -1.0) * shift.cast<std::complex<double>>()).exp();
        const SpectralField b = SpectralField::from_spectrum(grid, spec_j);
        const double norm = lp_norm(b, spec.p);
        if (norm == 0.0) continue;
        u = u + (sign * std::exp2(-spec.s * j) / norm) * b;
    }
    return u;
}

}  // namespace degenpar
