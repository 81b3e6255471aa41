#include "degenpar/degeneracy.hpp"

#include "degenpar/errors.hpp"
#include "degenpar/expression.hpp"
#include "degenpar/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace degenpar {

namespace {

std::string format_number(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

/// Uniform grid on [0, horizon] plus a geometric ladder toward 0; excludes t = 0.
std::vector<double> validation_samples(double horizon) {
    std::vector<double> ts;
    constexpr int uniform = 2048;
    for (int i = 1; i <= uniform; ++i) ts.push_back(horizon * i / uniform);
    for (double t = horizon / uniform; t > 1e-12; t /= 1.5) ts.push_back(t);
    std::sort(ts.begin(), ts.end());
    return ts;
}

}  // namespace

// ---------------------------------------------------------------- ScalarPath

ScalarPath::ScalarPath(Function value, std::optional<Function> antiderivative, std::string spec,
                       std::vector<double> breakpoints)
    : value_(std::move(value)),
      antiderivative_(std::move(antiderivative)),
      spec_(std::move(spec)),
      breakpoints_(std::move(breakpoints)) {
    std::sort(breakpoints_.begin(), breakpoints_.end());
}

double ScalarPath::integral(double s, double t, const QuadratureOptions& opts) const {
    if (!(s >= 0.0) || !(s <= t)) throw DomainError("integral: need 0 <= s <= t");
    if (s == t) return 0.0;
    if (antiderivative_) return (*antiderivative_)(t) - (*antiderivative_)(s);

    std::vector<double> cuts{s};
    for (double b : breakpoints_)
        if (b > s && b < t) cuts.push_back(b);
    cuts.push_back(t);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += integrate_from_origin_panels(value_, cuts[i], cuts[i + 1], opts).value;
    if (!std::isfinite(total))
        throw NumericalError("integral of '" + spec_ + "' is not finite", std::numeric_limits<double>::infinity());
    return total;
}

ScalarPath ScalarPath::scaled(double c) const {
    auto f = value_;
    std::optional<Function> big;
    if (antiderivative_) {
        auto g = *antiderivative_;
        big = [g, c](double t) { return c * g(t); };
    }
    return ScalarPath([f, c](double t) { return c * f(t); }, big, format_number(c) + "*(" + spec_ + ")",
                      breakpoints_);
}

ScalarPath ScalarPath::shifted(double c) const {
    auto f = value_;
    std::optional<Function> big;
    if (antiderivative_) {
        auto g = *antiderivative_;
        big = [g, c](double t) { return g(t) + c * t; };
    }
    return ScalarPath([f, c](double t) { return f(t) + c; }, big, "(" + spec_ + ")+" + format_number(c),
                      breakpoints_);
}

ScalarPath constant_path(double c) {
    return ScalarPath([c](double) { return c; }, [c](double t) { return c * t; },
                      "constant(" + format_number(c) + ")");
}

ScalarPath expression_path(const std::string& expr) {
    Expression e(expr);
    return ScalarPath([e](double t) { return e(t); }, std::nullopt, "expr(\"" + expr + "\")");
}

// --------------------------------------------------------- DegeneracyProfile

DegeneracyProfile::DegeneracyProfile(ScalarPath delta, double horizon, std::optional<double> bound)
    : delta_(std::move(delta)), horizon_(horizon), bound_(0.0) {
    if (!(horizon > 0.0)) throw ValidationError("profile horizon must be positive");
    double sampled = 0.0;
    for (double t : validation_samples(horizon)) {
        const double v = delta_(t);
        if (!std::isfinite(v))
            throw ValidationError("profile '" + delta_.spec() + "' is not finite at t=" + format_number(t));
        if (v < -1e-12)
            throw ValidationError("profile '" + delta_.spec() + "' is negative at t=" + format_number(t));
        sampled = std::max(sampled, v);
    }
    if (bound) {
        if (sampled > *bound * (1 + 1e-12))
            throw ValidationError("profile '" + delta_.spec() + "' exceeds its declared bound");
        bound_ = *bound;
    } else {
        bound_ = sampled;
    }
}

DegeneracyProfile constant_profile(double c, double horizon) {
    if (!(c >= 0.0)) throw ValidationError("constant profile must be nonnegative");
    return DegeneracyProfile(constant_path(c), horizon, c);
}

DegeneracyProfile power_profile(double alpha, double horizon) {
    if (!(alpha >= 0.0)) throw ValidationError("power profile needs alpha >= 0 (bounded delta)");
    ScalarPath path(
        [alpha](double t) { return std::pow(t, alpha); },
        [alpha](double t) { return std::pow(t, alpha + 1.0) / (alpha + 1.0); },
        "power(" + format_number(alpha) + ")");
    return DegeneracyProfile(std::move(path), horizon, std::pow(horizon, alpha));
}

DegeneracyProfile oscillatory_profile(double horizon) {
    // ∫_0^t sin(1/s) ds = t sin(1/t) - Ci(1/t)
    ScalarPath path(
        [](double t) { return t == 0.0 ? 1.0 : 1.0 + std::sin(1.0 / t); },
        [](double t) {
            if (t <= 0.0) return 0.0;
            const double x = 1.0 / t;
            if (!std::isfinite(x)) return t;
            return t + t * std::sin(x) - cosine_integral(x);
        },
        "oscillatory()");
    return DegeneracyProfile(std::move(path), horizon, 2.0);
}

DegeneracyProfile power_log_profile(double alpha, double b, double horizon) {
    if (!(alpha >= 0.0)) throw ValidationError("power_log profile needs alpha >= 0");
    ScalarPath path(
        [alpha, b](double t) { return t == 0.0 ? 0.0 : std::pow(t, alpha) * std::pow(std::log1p(t), b); },
        std::nullopt, "power_log(" + format_number(alpha) + "," + format_number(b) + ")");
    return DegeneracyProfile(std::move(path), horizon);
}

DegeneracyProfile expression_profile(const std::string& expr, double horizon) {
    return DegeneracyProfile(expression_path(expr), horizon);
}

DegeneracyProfile piecewise_profile(const std::vector<std::pair<double, std::string>>& pieces, double horizon) {
    if (pieces.empty()) throw ValidationError("piecewise profile needs at least one piece");
    if (pieces.front().first != 0.0) throw ValidationError("piecewise profile must start at t=0");
    std::vector<double> starts;
    std::vector<Expression> exprs;
    std::string spec = "piecewise([";
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (i > 0 && !(pieces[i].first > pieces[i - 1].first))
            throw ValidationError("piecewise breakpoints must be strictly increasing");
        starts.push_back(pieces[i].first);
        exprs.emplace_back(pieces[i].second);
        spec += (i ? ",(" : "(") + format_number(pieces[i].first) + ",\"" + pieces[i].second + "\")";
    }
    spec += "])";
    ScalarPath path(
        [starts, exprs](double t) {
            const auto it = std::upper_bound(starts.begin(), starts.end(), t);
            const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - starts.begin() - 1));
            return exprs[k](t);
        },
        std::nullopt, spec, std::vector<double>(starts.begin() + 1, starts.end()));
    return DegeneracyProfile(std::move(path), horizon);
}

DegeneracyProfile regularize(const DegeneracyProfile& profile, double eps) {
    if (!(eps > 0.0)) throw DomainError("regularization needs eps > 0");
    return DegeneracyProfile(profile.delta().shifted(eps), profile.horizon(), profile.bound() + eps);
}

// ---------------------------------------------------------------- operations

double eval_delta(const DegeneracyProfile& profile, double t) {
    if (!(t >= 0.0)) throw DomainError("eval_delta: negative time");
    const double v = profile.delta()(t);
    if (!std::isfinite(v))
        throw NumericalError("delta of '" + profile.spec() + "' is not finite at t=" + format_number(t),
                             std::numeric_limits<double>::infinity());
    return std::max(v, 0.0);
}

double cumulative_delta(const DegeneracyProfile& profile, double t, const QuadratureOptions& opts) {
    if (!(t >= 0.0)) throw DomainError("cumulative_delta: negative time");
    return std::max(profile.delta().integral(0.0, t, opts), 0.0);
}

namespace {

double bisect_inverse(const DegeneracyProfile& profile, double h, double hi, const QuadratureOptions& opts) {
    double lo = 0.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (cumulative_delta(profile, mid, opts) >= h)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace

double inverse_cumulative(const DegeneracyProfile& profile, double h, const QuadratureOptions& opts) {
    if (!(h >= 0.0)) throw DomainError("inverse_cumulative: negative level");
    if (h == 0.0) return 0.0;
    const double top = cumulative_delta(profile, profile.horizon(), opts);
    if (h > top)
        throw RangeError("inverse_cumulative: level " + format_number(h) + " exceeds beta(T_max) = " +
                             format_number(top),
                         top);
    return bisect_inverse(profile, h, profile.horizon(), opts);
}

double levelset_measure(const DegeneracyProfile& profile, double h, double t0, const QuadratureOptions& opts) {
    if (!(h > 0.0)) throw DomainError("levelset_measure: need h > 0");
    if (!(t0 > 0.0)) throw DomainError("levelset_measure: need t0 > 0");
    const double top = cumulative_delta(profile, t0, opts);
    if (top < h) return 0.0;
    const double enter = bisect_inverse(profile, h, t0, opts);
    const double leave = top < 4.0 * h ? t0 : bisect_inverse(profile, 4.0 * h, t0, opts);
    return std::max(0.0, leave - enter);
}

BetaFit fit_beta_exponent(const DegeneracyProfile& profile, double t0, const std::vector<double>& h_grid,
                          const QuadratureOptions& opts) {
    if (h_grid.size() < 4) throw ValidationError("fit_beta_exponent: need at least 4 levels");
    const auto [hmin, hmax] = std::minmax_element(h_grid.begin(), h_grid.end());
    if (!(*hmin > 0.0)) throw ValidationError("fit_beta_exponent: levels must be positive");
    if (*hmax / *hmin < 100.0) throw ValidationError("fit_beta_exponent: levels must span two decades");

    std::vector<double> xs, ys;
    for (double h : h_grid) {
        const double m = levelset_measure(profile, h, t0, opts);
        if (m > 0.0) {
            xs.push_back(std::log(h));
            ys.push_back(std::log(m));
        }
    }
    if (xs.size() < 4)
        throw NumericalError("fit_beta_exponent: degenerate fit, fewer than 4 levels with positive measure",
                             std::numeric_limits<double>::infinity());

    const auto n = static_cast<Eigen::Index>(xs.size());
    Eigen::MatrixXd design(n, 2);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = xs[static_cast<std::size_t>(i)];
        rhs(i) = ys[static_cast<std::size_t>(i)];
    }
    const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
    BetaFit fit;
    fit.beta_hat = 1.0 / coef(1);
    fit.n0_hat = std::exp(coef(0));
    fit.residual = std::sqrt((design * coef - rhs).squaredNorm() / static_cast<double>(n));
    return fit;
}

// ----------------------------------------------------------- CoefficientPath

CoefficientPath::CoefficientPath(int dim, std::vector<ScalarPath> entries)
    : dim_(dim), entries_(std::move(entries)) {}

CoefficientPath CoefficientPath::scalar_times(ScalarPath g, const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() < 1) throw ValidationError("coefficient matrix must be square");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-14 * (1.0 + m.cwiseAbs().maxCoeff()))
        throw ValidationError("coefficient matrix must be symmetric");
    const int d = static_cast<int>(m.rows());
    std::vector<ScalarPath> entries;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) entries.push_back(m(i, j) == 1.0 ? g : g.scaled(m(i, j)));
    CoefficientPath path(d, std::move(entries));
    path.factored_ = std::make_pair(std::move(g), m);
    return path;
}

CoefficientPath CoefficientPath::from_entries(int dim, std::vector<ScalarPath> entries,
                                              const std::vector<double>& symmetry_samples) {
    if (dim < 1) throw ValidationError("coefficient dimension must be positive");
    if (entries.size() != static_cast<std::size_t>(dim * dim))
        throw ValidationError("coefficient path needs dim*dim entries");
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j)
            for (double t : symmetry_samples) {
                const double a = entries[static_cast<std::size_t>(i * dim + j)](t);
                const double b = entries[static_cast<std::size_t>(j * dim + i)](t);
                if (std::abs(a - b) > 1e-12 * (1.0 + std::abs(a)))
                    throw ValidationError("coefficient path is not symmetric at entry (" + std::to_string(i) +
                                          "," + std::to_string(j) + ")");
            }
    return CoefficientPath(dim, std::move(entries));
}

const ScalarPath& CoefficientPath::entry(int i, int j) const {
    return entries_[static_cast<std::size_t>(i * dim_ + j)];
}

Eigen::MatrixXd CoefficientPath::operator()(double t) const {
    Eigen::MatrixXd a(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j) a(i, j) = a(j, i) = entry(i, j)(t);
    return a;
}

Eigen::MatrixXd CoefficientPath::accumulate(double s, double t, const QuadratureOptions& opts) const {
    if (!(s >= 0.0) || !(s <= t)) throw DomainError("accumulate: need 0 <= s <= t");
    Eigen::MatrixXd b(dim_, dim_);
    if (factored_) {
        const double g = factored_->first.integral(s, t, opts);
        return g * factored_->second;
    }
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j) b(i, j) = b(j, i) = entry(i, j).integral(s, t, opts);
    return b;
}

double CoefficientPath::bound(double horizon) const {
    double m = 0.0;
    for (double t : validation_samples(horizon)) m = std::max(m, (*this)(t).cwiseAbs().maxCoeff());
    return m;
}

std::string CoefficientPath::spec() const {
    if (factored_) {
        std::ostringstream os;
        os.precision(17);
        os << "scalar_times(" << factored_->first.spec() << ", [";
        for (int i = 0; i < dim_; ++i) {
            os << (i ? ",[" : "[");
            for (int j = 0; j < dim_; ++j) os << (j ? "," : "") << factored_->second(i, j);
            os << "]";
        }
        os << "])";
        return os.str();
    }
    std::string s = "matrix([";
    for (int i = 0; i < dim_; ++i) {
        s += i ? ",[" : "[";
        for (int j = 0; j < dim_; ++j) s += (j ? "," : "") + entry(i, j).spec();
        s += "]";
    }
    return s + "])";
}

CoefficientPath epsilon_regularize(const CoefficientPath& path, double eps) {
    if (!(eps > 0.0)) throw DomainError("epsilon_regularize: need eps > 0");
    const int d = path.dim();
    std::vector<ScalarPath> entries;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) entries.push_back(i == j ? path.entry(i, j).shifted(eps) : path.entry(i, j));
    return CoefficientPath::from_entries(d, std::move(entries));
}

double check_domination(const CoefficientPath& path, const DegeneracyProfile& profile,
                        const std::vector<double>& sample_times) {
    double worst = 0.0;
    for (double t : sample_times) {
        const double top = path(t).cwiseAbs().maxCoeff();
        const double floor = eval_delta(profile, t);
        if (floor == 0.0) {
            if (top > 0.0) return std::numeric_limits<double>::infinity();
            continue;
        }
        worst = std::max(worst, top / floor);
    }
    return worst;
}

DegeneracyProfile min_eigenvalue_profile(const CoefficientPath& path, double horizon) {
    if (path.dim() == 1) return DegeneracyProfile(path.entry(0, 0), horizon);
    if (const auto& f = path.factored()) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(f->second, Eigen::EigenvaluesOnly);
        const double lmin = eig.eigenvalues()(0);
        // g ≥ 0 makes λ_min(g M) = g λ_min(M); otherwise fall through to pointwise
        bool g_nonnegative = true;
        for (double t : validation_samples(horizon)) g_nonnegative = g_nonnegative && f->first(t) >= 0.0;
        if (g_nonnegative && lmin >= 0.0) return DegeneracyProfile(f->first.scaled(lmin), horizon);
    }
    ScalarPath lam(
        [path](double t) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(path(t), Eigen::EigenvaluesOnly);
            const double v = eig.eigenvalues()(0);
            return (v < 0.0 && v > -1e-12) ? 0.0 : v;
        },
        std::nullopt, "min_eigenvalue(" + path.spec() + ")");
    return DegeneracyProfile(std::move(lam), horizon);
}

double ellipticity_margin(const CoefficientPath& path, const DegeneracyProfile& profile,
                          const std::vector<double>& sample_times) {
    double margin = std::numeric_limits<double>::infinity();
    for (double t : sample_times) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(path(t), Eigen::EigenvaluesOnly);
        margin = std::min(margin, eig.eigenvalues()(0) - eval_delta(profile, t));
    }
    return margin;
}

}  // namespace degenpar
