#pragma once

#include "degenpar/spectral_field.hpp"

#include <vector>

namespace degenpar {

/// Smooth step: 0 for x ≤ 0, 1 for x ≥ 1, built from exp(-1/x).
double smooth_step(double x);

/// Littlewood–Paley family built from the radial cutoff χ(r) = g(2 - r):
/// χ = 1 on r ≤ 1, χ = 0 on r ≥ 2, and Ψ̂_j(r) = χ(2^-j r) - χ(2^-j+1 r).
struct LPFamily {
    int j_min = 0;
    int j_max = 0;

    static LPFamily for_grid(const GridSpec& grid);

    static double chi(double r);
    static double block(int j, double r);

    Eigen::ArrayXd block_symbol(int j, const Wavevectors& w) const;
    Eigen::ArrayXd low_pass_symbol(const Wavevectors& w) const;
};

/// Δ_j u.
SpectralField lp_block(const SpectralField& u, int j, const LPFamily& fam);
/// S_0 u = F^-1[χ F u].
SpectralField s0_block(const SpectralField& u, const LPFamily& fam);

/// max over grid frequencies 0 < |ξ| ≤ 2^j_max of the telescoping defect
/// |χ(2^-j_max ξ) - Σ_j Ψ̂_j(ξ) - χ(2^-j_min+1 ξ)|.
double partition_of_unity_defect(const LPFamily& fam, const GridSpec& grid);

/// ‖S_0 u‖_p + (Σ_{j=1}^{j_max} 2^{spj} ‖Δ_j u‖_p^p)^{1/p}.
double besov_norm(const SpectralField& u, double s, double p, const LPFamily& fam);
/// ‖(1 - Δ)^{n/2} u‖_p.
double bessel_norm(const SpectralField& u, double n, double p);
/// Multiplier |ξ|^gamma (zero at ξ = 0).
SpectralField frac_laplacian(const SpectralField& u, double gamma);

/// All d² entries u_{x^i x^j}, row-major.
std::vector<SpectralField> second_derivatives(const SpectralField& u);
/// Pointwise Frobenius norm of (1 - Δ)^{n/2} Hess u.
SpectralField hessian_frobenius(const SpectralField& u, double n = 0.0);
/// ‖ |(1 - Δ)^{n/2} Hess u|_F ‖_p.
double hessian_norm(const SpectralField& u, double n, double p);

}  // namespace degenpar
