#pragma once

#include "degenpar/spectral_field.hpp"

#include <cstdint>
#include <vector>

namespace degenpar {

/// exp(-|x|² / (2σ²)).
SpectralField gaussian_data(const GridSpec& grid, double sigma);

/// cos(2π k·x / L) for an integer wavenumber vector (missing trailing entries are 0).
SpectralField mode_data(const GridSpec& grid, const std::vector<int>& k);

struct RoughSpec {
    double s = 1.0;
    double p = 2.0;
    std::uint64_t seed = 0;
    /// Highest block used; -1 means the grid's j_max.
    int j_max = -1;
};

/// Σ_{j=1}^{J} 2^{-sj} r_j b_j, where b_j is the Littlewood–Paley block kernel of scale j,
/// shifted to a seeded centre and normalized to unit L_p, and r_j = ±1 are seeded signs.
SpectralField rough_data(const GridSpec& grid, const RoughSpec& spec);

}  // namespace degenpar
