#include "degenpar/estimates.hpp"

#include "degenpar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace degenpar {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::vector<double> node_norms(const std::vector<SpectralField>& fields, double n, double p) {
    std::vector<double> out;
    out.reserve(fields.size());
    for (const auto& f : fields) out.push_back(bessel_norm(f, n, p));
    return out;
}

std::vector<double> forcing_norms(const Forcing& f, const TimePartition& partition, const GridSpec& grid, double n,
                                  double p) {
    std::vector<double> out(partition.size(), 0.0);
    if (!f) return out;
    for (std::size_t k = 0; k < partition.size(); ++k) {
        const SpectralField fk = f(partition[k]);
        if (!(fk.grid() == grid)) throw ValidationError("forcing lives on a different grid");
        out[k] = bessel_norm(fk, n, p);
    }
    return out;
}

std::vector<double> hessian_norms(const std::vector<SpectralField>& snapshots, double n, double p) {
    std::vector<double> out;
    out.reserve(snapshots.size());
    for (const auto& u : snapshots) out.push_back(hessian_norm(u, n, p));
    return out;
}

void check_p(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("exponent p must be finite and > 1");
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

}  // namespace

double weighted_time_norm(const std::vector<double>& spatial_norms, const TimePartition& partition,
                          const DegeneracyProfile& profile, double p, double m) {
    check_p(p);
    if (spatial_norms.size() != partition.size())
        throw ValidationError("weighted norm: one spatial norm per partition node is required");
    const auto w = partition.trapezoid_weights(partition.size() - 1);
    double sum = 0.0;
    for (std::size_t k = 0; k < spatial_norms.size(); ++k) {
        const double s = spatial_norms[k];
        if (s == 0.0) continue;
        double weight = 1.0;
        if (m != 0.0) {
            const double d = eval_delta(profile, partition[k]);
            if (d == 0.0) {
                if (m > 0.0) continue;
                return inf;
            }
            weight = std::pow(d, m);
        }
        sum += w[k] * std::pow(s, p) * weight;
    }
    return std::pow(sum, 1.0 / p);
}

double weighted_norm(const std::vector<SpectralField>& snapshots, const TimePartition& partition,
                     const WeightedNormSpec& spec) {
    return weighted_time_norm(node_norms(snapshots, spec.n, spec.p), partition, spec.profile, spec.p, spec.m);
}

double EstimateReport::rhs_total() const {
    double s = 0.0;
    for (const auto& [name, v] : rhs) s += v;
    return s;
}

void finalize_ratio(EstimateReport& r) {
    const double total = r.rhs_total();
    if (!std::isfinite(total)) {
        r.admissible = false;
        r.flags.push_back("rhs_infinite");
        r.ratio = nan;
    } else if (total == 0.0) {
        r.ratio = r.lhs == 0.0 ? 0.0 : inf;
    } else {
        r.ratio = r.lhs / total;
    }
    if (!std::isfinite(r.lhs)) r.flags.push_back("lhs_infinite");
}

std::string estimate_csv_header() { return "theorem,n,p,m,profile_spec,grid_n,K,lhs,rhs_1,rhs_2,ratio,flags"; }

std::string to_csv_row(const EstimateReport& r) {
    std::ostringstream os;
    auto rhs_at = [&](std::size_t i) { return i < r.rhs.size() ? fmt(r.rhs[i].second) : std::string("0"); };
    std::string flags;
    for (const auto& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
    if (!r.admissible && std::find(r.flags.begin(), r.flags.end(), "inadmissible") == r.flags.end())
        flags += (flags.empty() ? "" : ";") + std::string("inadmissible");
    os << r.theorem << ',' << fmt(r.n) << ',' << fmt(r.p) << ',' << fmt(r.m) << ',' << csv_quote(r.profile_spec) << ','
       << r.grid_n << ',' << r.intervals << ',' << fmt(r.lhs) << ',' << rhs_at(0) << ',' << rhs_at(1) << ','
       << fmt(r.ratio) << ',' << csv_quote(flags);
    return os.str();
}

// ------------------------------------------------------ weighted maximal regularity

EstimateReport evaluate_thm1(const SolveReport& report, const Forcing& f, const SpectralField& u0,
                             const DegeneracyProfile& profile, double n, double p) {
    check_p(p);
    const GridSpec& grid = u0.grid();
    EstimateReport r;
    r.theorem = "thm1";
    r.n = n;
    r.p = p;
    r.m = 1.0;
    r.profile_spec = profile.spec();
    r.grid_n = grid.n;
    r.intervals = report.partition.intervals();
    r.lhs = weighted_time_norm(hessian_norms(report.snapshots, n, p), report.partition, profile, p, 1.0);
    const double f_norm =
        weighted_time_norm(forcing_norms(f, report.partition, grid, n, p), report.partition, profile, p, 1.0 - p);
    const LPFamily fam = LPFamily::for_grid(grid);
    r.rhs = {{"forcing", f_norm}, {"initial_besov", besov_norm(u0, n + 2.0 - 2.0 / p, p, fam)}};
    r.echo = {{"d", grid.dim}, {"p", p}, {"n", n}, {"T", report.partition.horizon()}};
    finalize_ratio(r);
    return r;
}

EstimateReport check_thm1(const SpectralField& u0, const Forcing& f, const CoefficientPath& path,
                          const DegeneracyProfile& profile, double n, double p, const TimePartition& partition,
                          const SolveOptions& opts) {
    check_p(p);
    SolveOptions o = opts;
    o.compute_norms = false;
    return evaluate_thm1(solve_duhamel(u0, f, path, partition, o), f, u0, profile, n, p);
}

// ---------------------------------------------------------- level-set estimate

EstimateReport check_thm2(const SpectralField& u0, const CoefficientPath& path, const DegeneracyProfile& profile,
                          double p, const Thm2Inputs& inputs, const TimePartition& partition,
                          const SolveOptions& opts) {
    check_p(p);
    const GridSpec& grid = u0.grid();
    EstimateReport r;
    r.theorem = "thm2";
    r.n = 0.0;
    r.p = p;
    r.m = 0.0;
    r.profile_spec = profile.spec();
    r.grid_n = grid.n;
    r.intervals = partition.intervals();

    const double beta = inputs.fit.beta_hat;
    const double nbar0 = check_domination(path, profile, partition.nodes());
    r.echo = {{"d", grid.dim},
              {"p", p},
              {"T", partition.horizon()},
              {"N0", inputs.fit.n0_hat},
              {"Nbar0", nbar0},
              {"beta", beta},
              {"t0", inputs.t0},
              {"int_delta_t0", cumulative_delta(profile, inputs.t0, opts.quadrature)}};

    if (!(std::isfinite(beta) && beta > 0.0) || !std::isfinite(inputs.fit.n0_hat)) {
        r.admissible = false;
        r.flags.push_back("levelset_fit_failed");
    }
    if (!std::isfinite(nbar0)) {
        r.admissible = false;
        r.flags.push_back("domination_infinite");
    }
    if (!r.admissible) {
        r.flags.push_back("inadmissible");
        r.lhs = r.ratio = nan;
        return r;
    }

    SolveOptions o = opts;
    o.compute_norms = false;
    const SolveReport report = solve_homogeneous(u0, path, partition, o);
    r.lhs = weighted_time_norm(hessian_norms(report.snapshots, 0.0, p), partition, profile, p, 0.0);
    const double s = 2.0 * (1.0 - 1.0 / (beta * p));
    r.echo["besov_s"] = s;
    r.rhs = {{"initial_besov", besov_norm(u0, s, p, LPFamily::for_grid(grid))}};
    finalize_ratio(r);
    return r;
}

// ------------------------------------------------------------------- classic

EstimateReport check_classic(const SolveReport& report, const Forcing& f, const SpectralField& u0, double p) {
    check_p(p);
    const GridSpec& grid = u0.grid();
    EstimateReport r;
    r.theorem = "classic";
    r.p = p;
    r.grid_n = grid.n;
    r.intervals = report.partition.intervals();
    for (const auto& u : report.snapshots) r.lhs = std::max(r.lhs, lp_norm(u, p));
    // δ plays no role here; any profile with m = 0 gives the unweighted norm
    const double f_norm = weighted_time_norm(forcing_norms(f, report.partition, grid, 0.0, p), report.partition,
                                             constant_profile(1.0), p, 0.0);
    r.rhs = {{"forcing", f_norm}, {"initial_lp", lp_norm(u0, p)}};
    r.echo = {{"d", grid.dim}, {"p", p}, {"T", report.partition.horizon()}};
    finalize_ratio(r);
    return r;
}

// -------------------------------------------------------------- kernel decay

double kernel_block_mass(const Eigen::MatrixXd& accumulated, const GridSpec& grid, int k, double gamma,
                         const LPFamily& fam) {
    if (k < fam.j_min || k > fam.j_max) throw DomainError("kernel decay: block index outside the grid's LP range");
    if (gamma < 0.0) throw DomainError("kernel decay: gamma must be >= 0");
    const Wavevectors w = wavevectors(grid);
    Eigen::ArrayXd symbol = propagator_symbol(accumulated, w) * fam.block_symbol(k, w);
    if (gamma != 0.0) symbol *= w.norm2.pow(0.5 * gamma);
    // samples of the kernel are ifft(symbol) / cell volume, so the L1 norm is Σ|ifft(symbol)|
    return fft_inverse(grid, symbol.cast<std::complex<double>>()).real().abs().sum();
}

KernelDecayFit check_kernel_decay(const CoefficientPath& path, const DegeneracyProfile& profile, double gamma,
                                  const std::vector<int>& k_range, const std::vector<double>& t_samples,
                                  const GridSpec& grid, const QuadratureOptions& opts) {
    if (k_range.empty() || t_samples.empty()) throw ValidationError("kernel decay: empty sample set");
    const LPFamily fam = LPFamily::for_grid(grid);
    KernelDecayFit fit;
    fit.gamma = gamma;
    for (double t : t_samples) {
        const double beta = cumulative_delta(profile, t, opts);
        if (!(beta > 0.0)) throw PreconditionViolation("kernel decay: beta(t) = 0 at t = " + fmt(t));
        const Eigen::MatrixXd b = path.accumulate(0.0, t, opts);
        for (int k : k_range) fit.samples.push_back({k, t, beta, kernel_block_mass(b, grid, k, gamma, fam), false});
    }
    double top = 0.0;
    for (const auto& s : fit.samples) top = std::max(top, s.mass);
    fit.noise_floor = 1e-12 * top;
    for (auto& s : fit.samples) s.below_noise_floor = s.mass <= fit.noise_floor;

    const double ln2 = std::numbers::ln2;
    auto log_n = [&](double c) {
        double best = -inf;
        for (const auto& s : fit.samples)
            if (!s.below_noise_floor)
                best = std::max(best, std::log(s.mass) - s.k * gamma * ln2 + c * s.beta * std::ldexp(1.0, 2 * s.k));
        return best;
    };
    constexpr int grid_points = 60;
    const double lo = std::log(1e-3), hi = std::log(10.0);
    const double base = log_n(1e-3);
    fit.c_hat = 1e-3;
    for (int i = 0; i < grid_points; ++i) {
        const double c = std::exp(lo + (hi - lo) * i / (grid_points - 1));
        if (log_n(c) <= base + std::log(10.0)) fit.c_hat = c;
    }
    const double ln = log_n(fit.c_hat);
    fit.n_hat = std::isfinite(ln) ? std::exp(ln) : 0.0;

    // certificate: re-check every sample against the fitted bound
    for (const auto& s : fit.samples) {
        if (s.below_noise_floor) continue;
        const double bound = ln + s.k * gamma * ln2 - fit.c_hat * s.beta * std::ldexp(1.0, 2 * s.k);
        if (std::log(s.mass) > bound + 1e-12) fit.violations.emplace_back(s.k, s.t);
    }
    return fit;
}

// ------------------------------------------------------------------ ε sweep

std::vector<EstimateReport> epsilon_sweep(const SpectralField& u0, const Forcing& f, const CoefficientPath& path,
                                          const DegeneracyProfile& profile, const std::vector<double>& eps_list,
                                          double n, double p, const TimePartition& partition,
                                          const SolveOptions& opts) {
    if (eps_list.empty()) throw ValidationError("epsilon sweep: empty eps list");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0)) throw ValidationError("epsilon sweep: eps must be positive");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw ValidationError("epsilon sweep: eps must decrease");
    }
    std::vector<EstimateReport> out;
    for (double eps : eps_list) {
        EstimateReport r =
            check_thm1(u0, f, epsilon_regularize(path, eps), regularize(profile, eps), n, p, partition, opts);
        r.theorem = "thm1_eps";
        r.echo["eps"] = eps;
        r.flags.push_back("eps=" + fmt(eps));
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace degenpar
