#include "degenpar/spectral.hpp"

#include "degenpar/errors.hpp"

#include <cmath>

namespace degenpar {

double smooth_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / x);
    const double b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

LPFamily LPFamily::for_grid(const GridSpec& grid) {
    grid.validate();
    LPFamily fam;
    fam.j_min = grid.j_min();
    fam.j_max = grid.j_max();
    if (fam.j_max < 1) throw ValidationError("grid too coarse for a Littlewood–Paley family (j_max < 1)");
    return fam;
}

double LPFamily::chi(double r) { return smooth_step(2.0 - r); }

double LPFamily::block(int j, double r) { return chi(std::ldexp(r, -j)) - chi(std::ldexp(r, 1 - j)); }

Eigen::ArrayXd LPFamily::block_symbol(int j, const Wavevectors& w) const {
    return w.norm2.sqrt().unaryExpr([j](double r) { return block(j, r); });
}

Eigen::ArrayXd LPFamily::low_pass_symbol(const Wavevectors& w) const {
    return w.norm2.sqrt().unaryExpr([](double r) { return chi(r); });
}

SpectralField lp_block(const SpectralField& u, int j, const LPFamily& fam) {
    if (j < fam.j_min || j > fam.j_max)
        throw DomainError("lp_block: j=" + std::to_string(j) + " outside [" + std::to_string(fam.j_min) + ", " +
                          std::to_string(fam.j_max) + "]");
    return apply_symbol(u, fam.block_symbol(j, wavevectors(u.grid())));
}

SpectralField s0_block(const SpectralField& u, const LPFamily& fam) {
    return apply_symbol(u, fam.low_pass_symbol(wavevectors(u.grid())));
}

double partition_of_unity_defect(const LPFamily& fam, const GridSpec& grid) {
    const Eigen::ArrayXd r = wavevectors(grid).norm2.sqrt();
    const double top = std::ldexp(1.0, fam.j_max);
    double defect = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        if (r(i) == 0.0 || r(i) > top) continue;
        double sum = 0.0;
        for (int j = fam.j_min; j <= fam.j_max; ++j) sum += LPFamily::block(j, r(i));
        const double telescoped = LPFamily::chi(std::ldexp(r(i), -fam.j_max)) - LPFamily::chi(std::ldexp(r(i), 1 - fam.j_min));
        defect = std::max(defect, std::abs(telescoped - sum));
    }
    return defect;
}

double besov_norm(const SpectralField& u, double s, double p, const LPFamily& fam) {
    if (!(p > 1.0)) throw DomainError("besov_norm: need p > 1");
    const Wavevectors w = wavevectors(u.grid());
    const double low = lp_norm(apply_symbol(u, fam.low_pass_symbol(w)), p);
    double sum = 0.0;
    for (int j = 1; j <= fam.j_max; ++j) {
        const double block = lp_norm(apply_symbol(u, fam.block_symbol(j, w)), p);
        sum += std::pow(2.0, s * p * j) * std::pow(block, p);
    }
    return low + std::pow(sum, 1.0 / p);
}

double bessel_norm(const SpectralField& u, double n, double p) {
    if (!(p > 1.0)) throw DomainError("bessel_norm: need p > 1");
    if (n == 0.0) return lp_norm(u, p);
    const Wavevectors w = wavevectors(u.grid());
    return lp_norm(apply_symbol(u, (1.0 + w.norm2).pow(0.5 * n)), p);
}

SpectralField frac_laplacian(const SpectralField& u, double gamma) {
    if (!(gamma >= 0.0)) throw DomainError("frac_laplacian: need gamma >= 0");
    const Wavevectors w = wavevectors(u.grid());
    Eigen::ArrayXd symbol = w.norm2.pow(0.5 * gamma);
    symbol = (w.norm2 == 0.0).select(0.0, symbol);
    if (gamma == 0.0) symbol = Eigen::ArrayXd::Ones(w.norm2.size());
    return apply_symbol(u, symbol);
}

std::vector<SpectralField> second_derivatives(const SpectralField& u) {
    const Wavevectors w = wavevectors(u.grid());
    const int d = u.grid().dim;
    std::vector<SpectralField> out;
    out.reserve(static_cast<std::size_t>(d * d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (j < i) {
                out.push_back(out[static_cast<std::size_t>(j * d + i)]);
                continue;
            }
            const auto& ci = i == j ? w.component : w.odd;
            out.push_back(apply_symbol(u, -(ci[static_cast<std::size_t>(i)] * ci[static_cast<std::size_t>(j)])));
        }
    return out;
}

namespace {

Eigen::ArrayXd hessian_frobenius_samples(const SpectralField& u, double n) {
    const Wavevectors w = wavevectors(u.grid());
    const int d = u.grid().dim;
    const Eigen::ArrayXd lift =
        n == 0.0 ? Eigen::ArrayXd::Ones(w.norm2.size()) : Eigen::ArrayXd((1.0 + w.norm2).pow(0.5 * n));
    Eigen::ArrayXd sq = Eigen::ArrayXd::Zero(w.norm2.size());
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            const auto& ci = i == j ? w.component : w.odd;
            const Eigen::ArrayXd symbol = -(ci[static_cast<std::size_t>(i)] * ci[static_cast<std::size_t>(j)]) * lift;
            const Eigen::ArrayXd entry =
                fft_inverse(u.grid(), u.spectrum() * symbol.cast<std::complex<double>>()).real();
            sq += (i == j ? 1.0 : 2.0) * entry.square();
        }
    return sq.sqrt();
}

}  // namespace

SpectralField hessian_frobenius(const SpectralField& u, double n) {
    return SpectralField::from_samples(u.grid(), hessian_frobenius_samples(u, n));
}

double hessian_norm(const SpectralField& u, double n, double p) {
    const Eigen::ArrayXd h = hessian_frobenius_samples(u, n);
    if (std::isinf(p)) return h.maxCoeff();
    if (!(p >= 1.0)) throw DomainError("hessian_norm: need p >= 1");
    return std::pow(h.pow(p).sum() * u.grid().cell_volume(), 1.0 / p);
}

}  // namespace degenpar
