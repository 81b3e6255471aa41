#include "degenpar/spectral_field.hpp"

#include "degenpar/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>

namespace degenpar {

Eigen::Index GridSpec::size() const {
    Eigen::Index s = 1;
    for (int a = 0; a < dim; ++a) s *= n;
    return s;
}

double GridSpec::cell_volume() const { return std::pow(spacing(), dim); }

void GridSpec::validate() const {
    if (dim < 1 || dim > 3) throw ValidationError("grid.dim must be 1, 2 or 3");
    if (n < 4 || (n & (n - 1)) != 0) throw ValidationError("grid.n must be a power of two >= 4");
    if (!(length > 0.0)) throw ValidationError("grid.length must be positive");
}

int GridSpec::j_max() const { return static_cast<int>(std::floor(std::log2(std::numbers::pi * n / length))) - 1; }

int GridSpec::j_min() const { return -static_cast<int>(std::floor(std::log2(length))); }

std::string to_string(const GridSpec& grid) {
    std::ostringstream os;
    os.precision(17);
    os << "dim=" << grid.dim << " n=" << grid.n << " L=" << grid.length;
    return os.str();
}

namespace {

Eigen::Index stride(const GridSpec& g, int axis) {
    Eigen::Index s = 1;
    for (int a = axis + 1; a < g.dim; ++a) s *= g.n;
    return s;
}

int axis_index(const GridSpec& g, Eigen::Index flat, int axis) {
    return static_cast<int>((flat / stride(g, axis)) % g.n);
}

// one transform object per thread; kissfft caches twiddles per size
Eigen::FFT<double>& thread_fft() {
    thread_local Eigen::FFT<double> fft;
    return fft;
}

Eigen::ArrayXcd transform(const GridSpec& g, Eigen::ArrayXcd data, bool inverse) {
    if (data.size() != g.size()) throw ValidationError("transform: data size does not match grid");
    auto& fft = thread_fft();
    std::vector<std::complex<double>> line(static_cast<std::size_t>(g.n)), out;
    const Eigen::Index total = g.size();
    for (int axis = 0; axis < g.dim; ++axis) {
        const Eigen::Index s = stride(g, axis);
        const Eigen::Index block = s * g.n;
        for (Eigen::Index outer = 0; outer < total; outer += block)
            for (Eigen::Index inner = 0; inner < s; ++inner) {
                const Eigen::Index base = outer + inner;
                for (int k = 0; k < g.n; ++k) line[static_cast<std::size_t>(k)] = data(base + k * s);
                if (inverse)
                    fft.inv(out, line);
                else
                    fft.fwd(out, line);
                for (int k = 0; k < g.n; ++k) data(base + k * s) = out[static_cast<std::size_t>(k)];
            }
    }
    return data;
}

}  // namespace

Wavevectors wavevectors(const GridSpec& grid) {
    Wavevectors w;
    const Eigen::Index total = grid.size();
    const double unit = 2.0 * std::numbers::pi / grid.length;
    w.norm2 = Eigen::ArrayXd::Zero(total);
    for (int a = 0; a < grid.dim; ++a) {
        Eigen::ArrayXd c(total), odd(total);
        for (Eigen::Index i = 0; i < total; ++i) {
            const int k = axis_index(grid, i, a);
            c(i) = unit * grid.signed_index(k);
            odd(i) = 2 * k == grid.n ? 0.0 : c(i);
        }
        w.norm2 += c.square();
        w.component.push_back(std::move(c));
        w.odd.push_back(std::move(odd));
    }
    return w;
}

std::vector<Eigen::ArrayXd> coordinates(const GridSpec& grid) {
    std::vector<Eigen::ArrayXd> xs;
    const Eigen::Index total = grid.size();
    for (int a = 0; a < grid.dim; ++a) {
        Eigen::ArrayXd c(total);
        for (Eigen::Index i = 0; i < total; ++i) c(i) = grid.coordinate(axis_index(grid, i, a));
        xs.push_back(std::move(c));
    }
    return xs;
}

Eigen::ArrayXcd fft_forward(const GridSpec& grid, const Eigen::ArrayXcd& data) { return transform(grid, data, false); }

Eigen::ArrayXcd fft_inverse(const GridSpec& grid, const Eigen::ArrayXcd& data) { return transform(grid, data, true); }

SpectralField SpectralField::from_samples(const GridSpec& grid, Eigen::ArrayXd samples) {
    grid.validate();
    if (samples.size() != grid.size()) throw ValidationError("field samples do not match grid size");
    Eigen::ArrayXcd spec = fft_forward(grid, samples.cast<std::complex<double>>());
    return SpectralField(grid, std::move(samples), std::move(spec));
}

SpectralField SpectralField::from_spectrum(const GridSpec& grid, const Eigen::ArrayXcd& spectrum) {
    grid.validate();
    if (spectrum.size() != grid.size()) throw ValidationError("spectrum does not match grid size");
    return from_samples(grid, fft_inverse(grid, spectrum).real());
}

SpectralField SpectralField::zero(const GridSpec& grid) {
    grid.validate();
    return SpectralField(grid, Eigen::ArrayXd::Zero(grid.size()), Eigen::ArrayXcd::Zero(grid.size()));
}

SpectralField forward_field(const GridSpec& grid, const Eigen::ArrayXd& samples) {
    return SpectralField::from_samples(grid, samples);
}

Eigen::ArrayXcd forward(const SpectralField& field) { return field.spectrum(); }

SpectralField inverse(const Eigen::ArrayXcd& spectrum, const GridSpec& grid) {
    return SpectralField::from_spectrum(grid, spectrum);
}

namespace {
void require_same_grid(const SpectralField& a, const SpectralField& b) {
    if (!(a.grid() == b.grid())) throw ValidationError("fields live on different grids");
}
}  // namespace

SpectralField operator+(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a, b);
    return SpectralField::from_samples(a.grid(), a.samples() + b.samples());
}

SpectralField operator-(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a, b);
    return SpectralField::from_samples(a.grid(), a.samples() - b.samples());
}

SpectralField operator*(double c, const SpectralField& a) {
    return SpectralField::from_samples(a.grid(), c * a.samples());
}

SpectralField apply_symbol(const SpectralField& u, const Eigen::ArrayXd& symbol) {
    if (symbol.size() != u.grid().size()) throw ValidationError("symbol size does not match grid");
    return SpectralField::from_spectrum(u.grid(), u.spectrum() * symbol.cast<std::complex<double>>());
}

double lp_norm(const SpectralField& u, double p) {
    if (std::isinf(p)) return u.samples().abs().maxCoeff();
    if (!(p >= 1.0)) throw DomainError("lp_norm: need p >= 1");
    const double vol = u.grid().cell_volume();
    if (p == 2.0) return std::sqrt(u.samples().square().sum() * vol);
    return std::pow(u.samples().abs().pow(p).sum() * vol, 1.0 / p);
}

double spectral_l2_norm(const SpectralField& u) {
    const auto& g = u.grid();
    const double total = static_cast<double>(g.size());
    return std::sqrt(u.spectrum().abs2().sum() * g.cell_volume() / total);
}

double grid_integral(const SpectralField& u) { return u.samples().sum() * u.grid().cell_volume(); }

double inner_product(const SpectralField& u, const SpectralField& v) {
    require_same_grid(u, v);
    return (u.samples() * v.samples()).sum() * u.grid().cell_volume();
}

void write_field(std::ostream& out, const SpectralField& u) {
    const std::int64_t dim = u.grid().dim, n = u.grid().n;
    const double len = u.grid().length;
    out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(&len), sizeof len);
    out.write(reinterpret_cast<const char*>(u.samples().data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(u.samples().size())));
    if (!out) throw std::runtime_error("write_field: stream failure");
}

SpectralField read_field(std::istream& in) {
    std::int64_t dim = 0, n = 0;
    double len = 0.0;
    in.read(reinterpret_cast<char*>(&dim), sizeof dim);
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    in.read(reinterpret_cast<char*>(&len), sizeof len);
    if (!in) throw ValidationError("read_field: truncated header");
    GridSpec g{static_cast<int>(dim), static_cast<int>(n), len};
    g.validate();
    Eigen::ArrayXd samples(g.size());
    in.read(reinterpret_cast<char*>(samples.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(samples.size())));
    if (!in) throw ValidationError("read_field: truncated samples");
    return SpectralField::from_samples(g, std::move(samples));
}

void write_field(const std::string& path, const SpectralField& u) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    write_field(out, u);
}

SpectralField read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_field(in);
}

void write_field_csv(std::ostream& out, const SpectralField& u) {
    if (u.grid().dim != 1) throw ValidationError("CSV export is only defined for d = 1");
    out.precision(17);
    out << "x,u\n";
    for (int i = 0; i < u.grid().n; ++i) out << u.grid().coordinate(i) << ',' << u.samples()(i) << '\n';
}

}  // namespace degenpar
