#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace degenpar {

/// Uniform periodic grid on the torus [-L/2, L/2)^d with n points per axis.
struct GridSpec {
    int dim = 1;
    int n = 256;
    double length = 1.0;

    Eigen::Index size() const;
    double spacing() const { return length / n; }
    double cell_volume() const;
    double coordinate(int i) const { return -0.5 * length + i * spacing(); }
    /// Signed FFT index of position k along an axis: 0..n/2-1, then -n/2..-1.
    int signed_index(int k) const { return k < n / 2 ? k : k - n; }
    /// Throws ValidationError unless dim ∈ {1,2,3}, n is a power of two ≥ 4, L > 0.
    void validate() const;

    /// Highest Littlewood–Paley block whose annulus fits below Nyquist.
    int j_max() const;
    /// Lowest block that can contain a nonzero grid frequency.
    int j_min() const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

std::string to_string(const GridSpec& grid);

/// Wavevector components ξ_i and |ξ|² at every flat (row-major) grid index.
/// `odd` is ξ_i with the Nyquist index set to 0, for symbols odd in ξ_i (mixed
/// products ξ_i ξ_j, i ≠ j), so that they stay Hermitian on the grid.
struct Wavevectors {
    std::vector<Eigen::ArrayXd> component;
    std::vector<Eigen::ArrayXd> odd;
    Eigen::ArrayXd norm2;
};

Wavevectors wavevectors(const GridSpec& grid);
/// Physical coordinates x_i at every flat grid index.
std::vector<Eigen::ArrayXd> coordinates(const GridSpec& grid);

/// Unnormalized forward DFT over all axes (row-major layout).
Eigen::ArrayXcd fft_forward(const GridSpec& grid, const Eigen::ArrayXcd& data);
/// Inverse DFT including the 1/n^d factor.
Eigen::ArrayXcd fft_inverse(const GridSpec& grid, const Eigen::ArrayXcd& data);

/// Real field on a periodic grid stored with its DFT spectrum.
///
/// Both representations are materialized at construction, so a field is an
/// immutable value that can be shared across threads.
class SpectralField {
public:
    static SpectralField from_samples(const GridSpec& grid, Eigen::ArrayXd samples);
    /// Discards the imaginary part of the inverse transform, then re-derives the
    /// spectrum from the real samples.
    static SpectralField from_spectrum(const GridSpec& grid, const Eigen::ArrayXcd& spectrum);
    static SpectralField zero(const GridSpec& grid);

    const GridSpec& grid() const noexcept { return grid_; }
    const Eigen::ArrayXd& samples() const noexcept { return samples_; }
    const Eigen::ArrayXcd& spectrum() const noexcept { return spectrum_; }

private:
    SpectralField(GridSpec grid, Eigen::ArrayXd samples, Eigen::ArrayXcd spectrum)
        : grid_(grid), samples_(std::move(samples)), spectrum_(std::move(spectrum)) {}

    GridSpec grid_;
    Eigen::ArrayXd samples_;
    Eigen::ArrayXcd spectrum_;
};

SpectralField forward_field(const GridSpec& grid, const Eigen::ArrayXd& samples);
Eigen::ArrayXcd forward(const SpectralField& field);
SpectralField inverse(const Eigen::ArrayXcd& spectrum, const GridSpec& grid);

SpectralField operator+(const SpectralField& a, const SpectralField& b);
SpectralField operator-(const SpectralField& a, const SpectralField& b);
SpectralField operator*(double c, const SpectralField& a);

/// Multiply the spectrum by a real symbol evaluated at every grid frequency.
SpectralField apply_symbol(const SpectralField& u, const Eigen::ArrayXd& symbol);

/// Midpoint-rule L_p norm with cell volume (L/n)^d; p = infinity gives max |u|.
double lp_norm(const SpectralField& u, double p);
/// L_2 norm from the spectrum (Parseval).
double spectral_l2_norm(const SpectralField& u);
double grid_integral(const SpectralField& u);
double inner_product(const SpectralField& u, const SpectralField& v);

/// Binary format: int64 dim, int64 n, float64 L, then n^d float64 samples (little-endian, row-major).
void write_field(std::ostream& out, const SpectralField& u);
SpectralField read_field(std::istream& in);
void write_field(const std::string& path, const SpectralField& u);
SpectralField read_field(const std::string& path);
/// "x,u" rows; d = 1 only.
void write_field_csv(std::ostream& out, const SpectralField& u);

}  // namespace degenpar
