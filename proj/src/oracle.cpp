#include "degenpar/oracle.hpp"

#include "degenpar/errors.hpp"
#include "degenpar/spectral.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <random>
#include <thread>

namespace degenpar {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

Eigen::Index periodic_neighbour(const GridSpec& grid, Eigen::Index idx, int axis, int step) {
    Eigen::Index stride = 1;
    for (int a = grid.dim - 1; a > axis; --a) stride *= grid.n;
    const Eigen::Index k = (idx / stride) % grid.n;
    const Eigen::Index moved = ((k + step) % grid.n + grid.n) % grid.n;
    return idx + (moved - k) * stride;
}

/// Periodic central-difference matrices for ∂_a∂_b, row-major flat layout.
SparseMatrix difference_matrix(const GridSpec& grid, int a, int b) {
    const Eigen::Index size = grid.size();
    const double h2 = grid.spacing() * grid.spacing();
    std::vector<Eigen::Triplet<double>> entries;
    for (Eigen::Index i = 0; i < size; ++i) {
        if (a == b) {
            entries.emplace_back(i, periodic_neighbour(grid, i, a, 1), 1.0 / h2);
            entries.emplace_back(i, periodic_neighbour(grid, i, a, -1), 1.0 / h2);
            entries.emplace_back(i, i, -2.0 / h2);
        } else {
            for (int sa : {1, -1})
                for (int sb : {1, -1})
                    entries.emplace_back(i, periodic_neighbour(grid, periodic_neighbour(grid, i, a, sa), b, sb),
                                         sa * sb / (4.0 * h2));
        }
    }
    SparseMatrix m(size, size);
    m.setFromTriplets(entries.begin(), entries.end());
    return m;
}

// ----------------------------------------------------------- sampling engine

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

struct Moments {
    double count = 0.0;
    Eigen::ArrayXd mean;
    Eigen::ArrayXd m2;
};

Moments combine(const Moments& a, const Moments& b) {
    if (a.count == 0.0) return b;
    if (b.count == 0.0) return a;
    Moments c;
    c.count = a.count + b.count;
    const Eigen::ArrayXd delta = b.mean - a.mean;
    c.mean = a.mean + delta * (b.count / c.count);
    c.m2 = a.m2 + b.m2 + delta.square() * (a.count * b.count / c.count);
    return c;
}

Moments pairwise(const std::vector<Moments>& parts, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return parts[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    return combine(pairwise(parts, lo, mid), pairwise(parts, mid, hi));
}

constexpr std::size_t chunk_size = 4096;

/// Runs `draw(rng, values)` once per sample and returns the moments of the value vector.
template <class Draw>
Moments sample_moments(Eigen::Index n_values, std::size_t samples, std::uint64_t seed, int workers, const Draw& draw) {
    const std::size_t chunks = (samples + chunk_size - 1) / chunk_size;
    std::vector<Moments> parts(chunks);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        Eigen::ArrayXd values(n_values);
        for (std::size_t c = next++; c < chunks; c = next++) {
            std::mt19937_64 rng(splitmix64(seed ^ splitmix64(c)));
            const std::size_t count = std::min(chunk_size, samples - c * chunk_size);
            Moments m{0.0, Eigen::ArrayXd::Zero(n_values), Eigen::ArrayXd::Zero(n_values)};
            for (std::size_t s = 0; s < count; ++s) {
                draw(rng, values);
                m.count += 1.0;
                const Eigen::ArrayXd delta = values - m.mean;
                m.mean += delta / m.count;
                m.m2 += delta * (values - m.mean);
            }
            parts[c] = std::move(m);
        }
    };
    const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(chunks)));
    std::vector<std::thread> pool;
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return pairwise(parts, 0, chunks);
}

/// Square roots of 2∫A over each partition cell.
std::vector<Eigen::MatrixXd> cell_factors(const CoefficientPath& path, const TimePartition& partition, std::size_t from,
                                          std::size_t to, const QuadratureOptions& opts) {
    std::vector<Eigen::MatrixXd> s;
    for (std::size_t i = from; i < to; ++i)
        s.push_back(covariance_sqrt(2.0 * path.accumulate(partition[i], partition[i + 1], opts)));
    return s;
}

}  // namespace

// ------------------------------------------------------------------------ FD

SolveReport fd_solve(const SpectralField& u0, const Forcing& f, const CoefficientPath& path, const FDScheme& scheme,
                     const SolveOptions& opts) {
    const GridSpec& grid = u0.grid();
    const int d = grid.dim;
    if (path.dim() != d) throw ValidationError("fd_solve: path and grid dimensions differ");
    if (!(scheme.theta >= 0.5 && scheme.theta <= 1.0)) throw DomainError("fd_solve: theta must lie in [1/2, 1]");
    const TimePartition& part = scheme.partition;

    std::vector<std::pair<std::pair<int, int>, SparseMatrix>> stencils;
    for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) stencils.push_back({{a, b}, difference_matrix(grid, a, b)});
    SparseMatrix identity(grid.size(), grid.size());
    identity.setIdentity();

    auto operator_at = [&](const Eigen::MatrixXd& a) {
        SparseMatrix l(grid.size(), grid.size());
        for (const auto& [ab, m] : stencils) l += ((ab.first == ab.second ? 1.0 : 2.0) * a(ab.first, ab.second)) * m;
        return l;
    };
    auto forcing_at = [&](double t) -> Eigen::VectorXd {
        if (!f) return Eigen::VectorXd::Zero(grid.size());
        const SpectralField ft = f(t);
        if (!(ft.grid() == grid)) throw ValidationError("forcing lives on a different grid");
        return ft.samples().matrix();
    };

    SolveReport r{part, {}, opts.p, {}, {}, {}, std::nullopt, {}};
    r.snapshots.push_back(u0);
    Eigen::SimplicialLDLT<SparseMatrix> solver;
    bool analysed = false;
    Eigen::MatrixXd last_a;
    double last_dt = -1.0;
    Eigen::VectorXd u = u0.samples().matrix();
    Eigen::VectorXd f_prev = forcing_at(part[0]);
    for (std::size_t k = 0; k + 1 < part.size(); ++k) {
        const double t0 = part[k], dt = part[k + 1] - part[k];
        const Eigen::MatrixXd a = scheme.sampling == CoefficientSampling::StepAverage
                                      ? Eigen::MatrixXd(path.accumulate(t0, t0 + dt, opts.quadrature) / dt)
                                      : path(t0 + scheme.theta * dt);
        if (!a.allFinite()) throw NumericalError("fd_solve: coefficients not finite on a step", 0.0);
        const SparseMatrix l = operator_at(a);
        if (dt != last_dt || a != last_a) {
            const SparseMatrix implicit = identity - (scheme.theta * dt) * l;
            if (!analysed) {
                solver.analyzePattern(implicit);
                analysed = true;
            }
            solver.factorize(implicit);
            if (solver.info() != Eigen::Success) throw NumericalError("fd_solve: sparse factorization failed", 0.0);
            last_a = a;
            last_dt = dt;
        }
        const Eigen::VectorXd f_next = forcing_at(part[k + 1]);
        Eigen::VectorXd rhs = u + ((1.0 - scheme.theta) * dt) * (l * u);
        rhs += dt * (scheme.theta * f_next + (1.0 - scheme.theta) * f_prev);
        u = solver.solve(rhs);
        if (solver.info() != Eigen::Success) throw NumericalError("fd_solve: linear solve failed", 0.0);
        f_prev = f_next;
        r.snapshots.push_back(SpectralField::from_samples(grid, u.array()));
    }
    if (opts.compute_norms)
        for (const auto& s : r.snapshots) {
            r.lp_norms.push_back(lp_norm(s, opts.p));
            r.h2_norms.push_back(bessel_norm(s, 2.0, opts.p));
        }
    return r;
}

// ------------------------------------------------------------------------ MC

Eigen::MatrixXd covariance_sqrt(const Eigen::MatrixXd& c) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
    if (eig.info() != Eigen::Success) throw NumericalError("covariance square root: eigensolver failed", 0.0);
    Eigen::VectorXd lambda = eig.eigenvalues();
    const double tol = 1e-12 * std::max(1.0, c.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) < -tol)
            throw NumericalError("covariance square root: matrix is not positive semidefinite", -lambda(i));
        lambda(i) = std::sqrt(std::max(lambda(i), 0.0));
    }
    return eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
}

double interpolate_periodic(const SpectralField& u, const Eigen::VectorXd& x) {
    const GridSpec& g = u.grid();
    if (x.size() != g.dim) throw ValidationError("interpolation point has the wrong dimension");
    int base[3];
    double w[3][4];
    for (int a = 0; a < g.dim; ++a) {
        const double pos = (x(a) + 0.5 * g.length) / g.spacing();
        const double fl = std::floor(pos);
        const double t = pos - fl;
        base[a] = static_cast<int>(((static_cast<long long>(fl) - 1) % g.n + g.n) % g.n);
        w[a][0] = -t * (t - 1) * (t - 2) / 6;
        w[a][1] = (t + 1) * (t - 1) * (t - 2) / 2;
        w[a][2] = -(t + 1) * t * (t - 2) / 2;
        w[a][3] = (t + 1) * t * (t - 1) / 6;
    }
    const auto& s = u.samples();
    double out = 0.0;
    const int corners = 1 << (2 * g.dim);
    for (int c = 0; c < corners; ++c) {
        Eigen::Index idx = 0;
        double weight = 1.0;
        for (int a = 0; a < g.dim; ++a) {
            const int o = (c >> (2 * a)) & 3;
            idx = idx * g.n + (base[a] + o) % g.n;
            weight *= w[a][o];
        }
        out += weight * s(idx);
    }
    return out;
}

MCEstimate mc_solve(const SpectralField& u0, const Forcing& f, const CoefficientPath& path,
                    const TimePartition& partition, const std::vector<Eigen::VectorXd>& points,
                    const MCOptions& opts) {
    const GridSpec& grid = u0.grid();
    const int d = grid.dim;
    if (path.dim() != d) throw ValidationError("mc_solve: path and grid dimensions differ");
    if (opts.samples < 1000) throw ValidationError("mc_solve: at least 1000 samples are required");
    if (points.empty()) throw ValidationError("mc_solve: no evaluation points");
    for (const auto& x : points)
        if (x.size() != d) throw ValidationError("mc_solve: evaluation point has the wrong dimension");

    const std::size_t K = partition.size() - 1;
    const auto weights = partition.trapezoid_weights(K);
    std::vector<SpectralField> forcing;
    std::vector<Eigen::MatrixXd> factors;
    if (f) {
        for (double s : partition.nodes()) forcing.push_back(f(s));
        factors = cell_factors(path, partition, 0, K, opts.quadrature);
    } else {
        factors = {covariance_sqrt(2.0 * path.accumulate(0.0, partition.horizon(), opts.quadrature))};
    }

    auto draw = [&](std::mt19937_64& rng, Eigen::ArrayXd& values) {
        std::normal_distribution<double> normal;
        std::vector<Eigen::VectorXd> tail(factors.size() + 1, Eigen::VectorXd::Zero(d));
        Eigen::VectorXd z(d);
        for (std::size_t i = factors.size(); i-- > 0;) {
            for (int a = 0; a < d; ++a) z(a) = normal(rng);
            tail[i] = tail[i + 1] + factors[i] * z;
        }
        for (std::size_t p = 0; p < points.size(); ++p) {
            double v = interpolate_periodic(u0, points[p] + tail[0]);
            for (std::size_t i = 0; i < forcing.size(); ++i)
                if (weights[i] != 0.0) v += weights[i] * interpolate_periodic(forcing[i], points[p] + tail[i]);
            values(static_cast<Eigen::Index>(p)) = v;
        }
    };
    const Moments m =
        sample_moments(static_cast<Eigen::Index>(points.size()), opts.samples, opts.seed, opts.workers, draw);
    MCEstimate e;
    e.points = points;
    e.mean = m.mean;
    e.standard_error = (m.m2 / (m.count - 1.0) / m.count).sqrt();
    e.samples = opts.samples;
    e.seed = opts.seed;
    return e;
}

void write_mc_csv(std::ostream& out, const MCEstimate& e) {
    const auto precision = out.precision(17);
    out << "x,mean,stderr,samples,seed\n";
    for (std::size_t p = 0; p < e.points.size(); ++p) {
        for (Eigen::Index a = 0; a < e.points[p].size(); ++a) out << (a ? " " : "") << e.points[p](a);
        const auto i = static_cast<Eigen::Index>(p);
        out << ',' << e.mean(i) << ',' << e.standard_error(i) << ',' << e.samples << ',' << e.seed << '\n';
    }
    out.precision(precision);
}

double CharacteristicCheck::z_score() const {
    auto z = [](double diff, double se) { return se > 0.0 ? std::abs(diff) / se : (diff == 0.0 ? 0.0 : INFINITY); };
    return std::max(z(real - expected, se_real), z(imag, se_imag));
}

std::vector<CharacteristicCheck> characteristic_function_check(const CoefficientPath& path,
                                                               const TimePartition& partition, std::size_t from,
                                                               std::size_t to,
                                                               const std::vector<Eigen::VectorXd>& frequencies,
                                                               const MCOptions& opts) {
    if (!(from < to && to < partition.size())) throw DomainError("characteristic check: need from < to <= K");
    if (frequencies.empty()) throw ValidationError("characteristic check: no frequencies");
    const int d = path.dim();
    const auto factors = cell_factors(path, partition, from, to, opts.quadrature);
    const Eigen::MatrixXd b = path.accumulate(partition[from], partition[to], opts.quadrature);
    const auto nf = static_cast<Eigen::Index>(frequencies.size());

    auto draw = [&](std::mt19937_64& rng, Eigen::ArrayXd& values) {
        std::normal_distribution<double> normal;
        Eigen::VectorXd x = Eigen::VectorXd::Zero(d), z(d);
        for (const auto& s : factors) {
            for (int a = 0; a < d; ++a) z(a) = normal(rng);
            x += s * z;
        }
        for (Eigen::Index i = 0; i < nf; ++i) {
            const double phase = frequencies[static_cast<std::size_t>(i)].dot(x);
            values(i) = std::cos(phase);
            values(nf + i) = std::sin(phase);
        }
    };
    const Moments m = sample_moments(2 * nf, opts.samples, opts.seed, opts.workers, draw);
    const Eigen::ArrayXd se = (m.m2 / (m.count - 1.0) / m.count).sqrt();
    std::vector<CharacteristicCheck> out;
    for (Eigen::Index i = 0; i < nf; ++i) {
        const auto& xi = frequencies[static_cast<std::size_t>(i)];
        out.push_back({xi, std::exp(-xi.dot(b * xi)), m.mean(i), m.mean(nf + i), se(i), se(nf + i)});
    }
    return out;
}

double compare_fields(const SpectralField& a, const SpectralField& b, double p) {
    if (!(a.grid() == b.grid())) throw ValidationError("compare_fields: grids differ");
    return lp_norm(a - b, p) / std::max(lp_norm(a, p), 1e-30);
}

}  // namespace degenpar
