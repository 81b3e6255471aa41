#include "degenpar/solver.hpp"

#include "degenpar/errors.hpp"
#include "degenpar/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

namespace degenpar {

// ------------------------------------------------------------- TimePartition

TimePartition::TimePartition(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2) throw ValidationError("time partition needs at least two nodes");
    if (nodes_.front() != 0.0) throw ValidationError("time partition must start at 0");
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        if (!(nodes_[i] > nodes_[i - 1])) throw ValidationError("time partition must be strictly increasing");
}

TimePartition TimePartition::uniform(int intervals, double horizon) {
    if (intervals < 1 || !(horizon > 0.0)) throw ValidationError("uniform partition needs K >= 1 and T > 0");
    std::vector<double> n(static_cast<std::size_t>(intervals) + 1);
    for (int k = 0; k <= intervals; ++k) n[static_cast<std::size_t>(k)] = horizon * k / intervals;
    n.back() = horizon;
    return TimePartition(std::move(n));
}

TimePartition TimePartition::geometric(int intervals, double horizon, std::optional<double> ratio) {
    if (intervals < 2 || !(horizon > 0.0)) throw ValidationError("geometric partition needs K >= 2 and T > 0");
    const double r = ratio.value_or(std::pow(1e-6, 1.0 / (intervals - 1)));
    if (!(r > 0.0 && r < 1.0)) throw ValidationError("geometric partition ratio must lie in (0, 1)");
    std::vector<double> n{0.0};
    for (int k = 1; k <= intervals; ++k) n.push_back(horizon * std::pow(r, intervals - k));
    n.back() = horizon;
    return TimePartition(std::move(n));
}

std::vector<double> TimePartition::trapezoid_weights(std::size_t k) const {
    std::vector<double> w(k + 1, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const double h = nodes_[i + 1] - nodes_[i];
        w[i] += h / 2;
        w[i + 1] += h / 2;
    }
    return w;
}

double SolveReport::max_weak_residual() const {
    double m = 0.0;
    for (double r : weak_residuals) m = std::max(m, r);
    return weak_residuals.empty() ? std::numeric_limits<double>::quiet_NaN() : m;
}

// ---------------------------------------------------------------- propagator

Eigen::ArrayXd propagator_symbol(const Eigen::MatrixXd& b, const Wavevectors& w) {
    const auto d = static_cast<int>(w.component.size());
    if (b.rows() != d || b.cols() != d) throw ValidationError("accumulated matrix does not match grid dimension");
    Eigen::ArrayXd q = Eigen::ArrayXd::Zero(w.norm2.size());
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            if (b(i, j) == 0.0) continue;
            const auto i_ = static_cast<std::size_t>(i), j_ = static_cast<std::size_t>(j);
            if (i == j)
                q += b(i, i) * w.component[i_].square();
            else
                q += 2.0 * b(i, j) * w.odd[i_] * w.odd[j_];
        }
    return (-q).exp();
}

PropagatorSymbol make_propagator(const CoefficientPath& path, double s, double t, const QuadratureOptions& opts) {
    if (s > t) throw DomainError("propagator: source time after target time");
    return PropagatorSymbol{s, t, path.accumulate(s, t, opts)};
}

Eigen::MatrixXd accumulate_coefficients(const CoefficientPath& path, double s, double t,
                                        const QuadratureOptions& opts) {
    return path.accumulate(s, t, opts);
}

SpectralField propagate(const SpectralField& u, const CoefficientPath& path, double s, double t,
                        const QuadratureOptions& opts) {
    if (s > t) throw DomainError("propagate: s > t");
    if (path.dim() != u.grid().dim) throw ValidationError("propagate: path and grid dimensions differ");
    return apply_symbol(u, propagator_symbol(path.accumulate(s, t, opts), wavevectors(u.grid())));
}

SpectralField kernel_from_accumulated(const Eigen::MatrixXd& accumulated, const GridSpec& grid) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(accumulated, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues()(0) > 0.0))
        throw PreconditionViolation("kernel: accumulated coefficients are singular, the kernel is a point mass");
    const Wavevectors w = wavevectors(grid);
    // centre at x = 0, which is grid index n/2 on every axis: phase (-1)^(k_1+...+k_d)
    Eigen::ArrayXd phase = Eigen::ArrayXd::Ones(grid.size());
    const double unit = 2.0 * std::numbers::pi / grid.length;
    for (const auto& c : w.component)
        phase *= (c / unit).round().unaryExpr([](double k) { return std::fmod(std::abs(k), 2.0) == 0.0 ? 1.0 : -1.0; });
    const double scale = 1.0 / grid.cell_volume();
    const Eigen::ArrayXd spec = scale * propagator_symbol(accumulated, w) * phase;
    return SpectralField::from_spectrum(grid, spec.cast<std::complex<double>>());
}

SpectralField kernel(const CoefficientPath& path, double t, const GridSpec& grid, const QuadratureOptions& opts) {
    if (!(t > 0.0)) throw PreconditionViolation("kernel: need t > 0");
    return kernel_from_accumulated(path.accumulate(0.0, t, opts), grid);
}

// -------------------------------------------------------------------- solves

namespace {

std::vector<Eigen::MatrixXd> cumulative_coefficients(const CoefficientPath& path, const TimePartition& partition,
                                                     const QuadratureOptions& opts) {
    std::vector<Eigen::MatrixXd> c{Eigen::MatrixXd::Zero(path.dim(), path.dim())};
    for (std::size_t k = 1; k < partition.size(); ++k)
        c.push_back(c.back() + path.accumulate(partition[k - 1], partition[k], opts));
    return c;
}

void fill_norms(SolveReport& r, const SolveOptions& opts) {
    r.p = opts.p;
    if (!opts.compute_norms) return;
    for (const auto& u : r.snapshots) {
        r.lp_norms.push_back(lp_norm(u, opts.p));
        r.h2_norms.push_back(bessel_norm(u, 2.0, opts.p));
    }
}

void check_dims(const SpectralField& u0, const CoefficientPath& path) {
    if (path.dim() != u0.grid().dim) throw ValidationError("coefficient path dimension differs from grid dimension");
}

}  // namespace

SolveReport solve_homogeneous(const SpectralField& u0, const CoefficientPath& path, const TimePartition& partition,
                              const SolveOptions& opts) {
    return solve_duhamel(u0, Forcing{}, path, partition, opts);
}

SolveReport solve_duhamel(const SpectralField& u0, const Forcing& f, const CoefficientPath& path,
                          const TimePartition& partition, const SolveOptions& opts) {
    check_dims(u0, path);
    SolveReport r{partition, {}, opts.p, {}, {}, {}, std::nullopt, cumulative_coefficients(path, partition, opts.quadrature)};
    const Wavevectors w = wavevectors(u0.grid());
    const std::complex<double> one(1.0, 0.0);

    std::vector<Eigen::ArrayXcd> forcing;
    if (f) {
        for (double s : partition.nodes()) {
            const SpectralField fs = f(s);
            if (!(fs.grid() == u0.grid())) throw ValidationError("forcing lives on a different grid");
            forcing.push_back(fs.spectrum());
        }
    }

    r.snapshots.reserve(partition.size());
    r.snapshots.push_back(u0);
    for (std::size_t k = 1; k < partition.size(); ++k) {
        if (!f && r.cumulative[k].isZero(0.0)) {
            r.snapshots.push_back(u0);
            continue;
        }
        Eigen::ArrayXcd spec = u0.spectrum() * propagator_symbol(r.cumulative[k], w).cast<std::complex<double>>();
        if (f) {
            const auto weights = partition.trapezoid_weights(k);
            for (std::size_t i = 0; i <= k; ++i) {
                const Eigen::ArrayXd sym = propagator_symbol(r.cumulative[k] - r.cumulative[i], w);
                spec += (weights[i] * one) * forcing[i] * sym.cast<std::complex<double>>();
            }
        }
        r.snapshots.push_back(SpectralField::from_spectrum(u0.grid(), spec));
    }
    fill_norms(r, opts);
    return r;
}

// --------------------------------------------------------------- time change

namespace {

/// φ = β^{-1} for a profile bounded below by a positive constant: table of β on a
/// uniform grid, then safeguarded Newton inside the bracketing cell.
class InverseClock {
public:
    InverseClock(DegeneracyProfile profile, double horizon, const QuadratureOptions& opts)
        : profile_(std::move(profile)), opts_(opts) {
        constexpr int cells = 1024;
        ts_.resize(cells + 1);
        betas_.resize(cells + 1);
        ts_[0] = betas_[0] = 0.0;
        for (int i = 1; i <= cells; ++i) {
            ts_[static_cast<std::size_t>(i)] = horizon * i / cells;
            betas_[static_cast<std::size_t>(i)] =
                betas_[static_cast<std::size_t>(i - 1)] +
                profile_.delta().integral(ts_[static_cast<std::size_t>(i - 1)], ts_[static_cast<std::size_t>(i)], opts_);
        }
    }

    double top() const { return betas_.back(); }

    double operator()(double tau) const {
        if (tau <= 0.0) return 0.0;
        if (tau > betas_.back() * (1 + 1e-14))
            throw RangeError("time change: clock value beyond beta(T)", betas_.back());
        auto it = std::upper_bound(betas_.begin(), betas_.end(), tau);
        const auto i = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - betas_.begin() - 1, 0,
                                                                           static_cast<std::ptrdiff_t>(ts_.size()) - 2));
        double lo = ts_[i], hi = ts_[i + 1];
        const double base = betas_[i];
        double t = lo + (tau - base) / (betas_[i + 1] - base) * (hi - lo);
        for (int it2 = 0; it2 < 60; ++it2) {
            const double g = base + profile_.delta().integral(ts_[i], t, opts_) - tau;
            if (g == 0.0) break;
            if (g > 0.0)
                hi = std::min(hi, t);
            else
                lo = std::max(lo, t);
            double next = t - g / profile_.delta()(t);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - t) <= 2e-16 * std::max(t, 1e-300)) {
                t = next;
                break;
            }
            t = next;
        }
        return t;
    }

    double rate(double t) const { return profile_.delta()(t); }

private:
    DegeneracyProfile profile_;
    QuadratureOptions opts_;
    std::vector<double> ts_;
    std::vector<double> betas_;
};

void require_uniform_floor(const DegeneracyProfile& profile, double horizon) {
    double floor = eval_delta(profile, 0.0);
    constexpr int samples = 4096;
    for (int i = 1; i <= samples; ++i) floor = std::min(floor, eval_delta(profile, horizon * i / samples));
    if (!(floor > 0.0))
        throw PreconditionViolation("time change requires delta >= eps > 0 on [0, T]; sampled minimum is " +
                                    std::to_string(floor));
}

}  // namespace

CoefficientPath time_changed_path(const CoefficientPath& path, const DegeneracyProfile& profile, double horizon) {
    require_uniform_floor(profile, horizon);
    auto clock = std::make_shared<const InverseClock>(profile, horizon, QuadratureOptions{});
    const double top = clock->top();
    auto transformed = [clock](const ScalarPath& a) {
        return ScalarPath(
            [clock, a](double tau) {
                const double t = (*clock)(tau);
                return a(t) / clock->rate(t);
            },
            std::nullopt, "time_changed(" + a.spec() + ")");
    };
    if (const auto& f = path.factored()) return CoefficientPath::scalar_times(transformed(f->first), f->second);
    std::vector<ScalarPath> entries;
    for (int i = 0; i < path.dim(); ++i)
        for (int j = 0; j < path.dim(); ++j) entries.push_back(transformed(path.entry(i, j)));
    return CoefficientPath::from_entries(path.dim(), std::move(entries), {0.25 * top, 0.5 * top, top});
}

SolveReport time_change_solve(const SpectralField& u0, const Forcing& f, const CoefficientPath& path,
                              const DegeneracyProfile& profile, const TimePartition& partition,
                              const SolveOptions& opts) {
    check_dims(u0, path);
    const double horizon = partition.horizon();
    require_uniform_floor(profile, horizon);
    auto clock = std::make_shared<const InverseClock>(profile, horizon, opts.quadrature);

    std::vector<double> taus{0.0};
    for (std::size_t k = 1; k < partition.size(); ++k)
        taus.push_back(cumulative_delta(profile, partition[k], opts.quadrature));
    taus.back() = std::min(taus.back(), clock->top());
    const TimePartition clock_partition(taus);

    Forcing transformed_f;
    if (f)
        transformed_f = [f, clock](double tau) {
            const double t = (*clock)(tau);
            return (1.0 / clock->rate(t)) * f(t);
        };
    SolveReport v = solve_duhamel(u0, transformed_f, time_changed_path(path, profile, horizon), clock_partition, opts);
    // report on the original clock
    v.partition = partition;
    return v;
}

// ------------------------------------------------------------- weak residual

namespace {

struct WeakTerms {
    std::vector<double> pairing;    // (u(t_i), φ)
    std::vector<double> integrand;  // Σ a^{ij}(t_i) (u(t_i), φ_ij) + (f(t_i), φ)
};

WeakTerms weak_terms(const SolveReport& report, const Forcing& f, const CoefficientPath& path,
                     const SpectralField& test, std::size_t last) {
    const auto hess = second_derivatives(test);
    const int d = test.grid().dim;
    WeakTerms w;
    for (std::size_t i = 0; i <= last; ++i) {
        const SpectralField& u = report.snapshots[i];
        const double t = report.partition[i];
        const Eigen::MatrixXd a = path(t);
        double g = 0.0;
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c)
                if (a(r, c) != 0.0) g += a(r, c) * inner_product(u, hess[static_cast<std::size_t>(r * d + c)]);
        if (f) g += inner_product(f(t), test);
        w.pairing.push_back(inner_product(u, test));
        w.integrand.push_back(g);
    }
    return w;
}

}  // namespace

double weak_residual(const SolveReport& report, const Forcing& f, const SpectralField& u0,
                     const CoefficientPath& path, const SpectralField& test, std::size_t k) {
    if (k >= report.snapshots.size()) throw DomainError("weak_residual: node index out of range");
    const WeakTerms w = weak_terms(report, f, path, test, k);
    const auto weights = report.partition.trapezoid_weights(k);
    double integral = 0.0;
    for (std::size_t i = 0; i <= k; ++i) integral += weights[i] * w.integrand[i];
    return std::abs(w.pairing[k] - inner_product(u0, test) - integral);
}

void attach_weak_residuals(SolveReport& report, const Forcing& f, const SpectralField& u0,
                           const CoefficientPath& path, const std::vector<SpectralField>& tests) {
    const std::size_t last = report.snapshots.size() - 1;
    report.weak_residuals.assign(report.snapshots.size(), 0.0);
    for (const auto& test : tests) {
        const WeakTerms w = weak_terms(report, f, path, test, last);
        const double base = inner_product(u0, test);
        double integral = 0.0;
        for (std::size_t k = 0; k <= last; ++k) {
            if (k > 0)
                integral += 0.5 * (report.partition[k] - report.partition[k - 1]) * (w.integrand[k - 1] + w.integrand[k]);
            report.weak_residuals[k] = std::max(report.weak_residuals[k], std::abs(w.pairing[k] - base - integral));
        }
    }
}

std::vector<SpectralField> default_test_functions(const GridSpec& grid) {
    const auto xs = coordinates(grid);
    std::vector<SpectralField> tests;
    const double l = grid.length;
    const std::pair<double, double> shapes[] = {{0.0, 0.08 * l}, {0.1 * l, 0.05 * l}, {-0.15 * l, 0.04 * l}};
    for (auto [centre, width] : shapes) {
        Eigen::ArrayXd r2 = Eigen::ArrayXd::Zero(grid.size());
        for (const auto& x : xs) r2 += (x - centre).square();
        tests.push_back(SpectralField::from_samples(grid, (-r2 / (2 * width * width)).exp()));
    }
    return tests;
}

void write_report(const SolveReport& report, const std::string& dir, const std::string& meta_extra) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ofstream meta(fs::path(dir) / "meta");
        meta.precision(17);
        meta << "grid = " << to_string(report.snapshots.front().grid()) << "\n";
        meta << "nodes = " << report.partition.size() << "\n";
        meta << "horizon = " << report.partition.horizon() << "\n";
        meta << "partition =";
        for (double t : report.partition.nodes()) meta << ' ' << t;
        meta << "\n";
        meta << "p = " << report.p << "\n";
        if (report.kernel_mass) meta << "kernel_mass = " << *report.kernel_mass << "\n";
        meta << meta_extra;
    }
    for (std::size_t k = 0; k < report.snapshots.size(); ++k)
        write_field((fs::path(dir) / ("snap_" + std::to_string(k) + ".bin")).string(), report.snapshots[k]);
    std::ofstream csv(fs::path(dir) / "norms.csv");
    csv.precision(17);
    csv << "k,t,Lp,H2p,weak_residual\n";
    auto cell = [](const std::vector<double>& v, std::size_t k) {
        std::ostringstream os;
        os.precision(17);
        if (k < v.size())
            os << v[k];
        else
            os << "nan";
        return os.str();
    };
    for (std::size_t k = 0; k < report.snapshots.size(); ++k)
        csv << k << ',' << report.partition[k] << ',' << cell(report.lp_norms, k) << ',' << cell(report.h2_norms, k)
            << ',' << cell(report.weak_residuals, k) << '\n';
}

}  // namespace degenpar
