#include "degenpar/config.hpp"

#include "degenpar/errors.hpp"
#include "degenpar/initial_data.hpp"
#include "degenpar/profile_spec.hpp"
#include "degenpar/spectral.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace degenpar {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_number(const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ValidationError("expected a number, got '" + t + "'");
    return v;
}

long long to_integer(const std::string& text) {
    const std::string t = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ValidationError("expected an integer, got '" + t + "'");
    return v;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string fmt(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        if constexpr (std::is_floating_point_v<T>)
            s += fmt(v[i]);
        else
            s += std::to_string(v[i]);
    }
    return s;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

std::vector<int> int_list(const std::string& v) {
    std::vector<int> out;
    for (const auto& s : split_list(v)) out.push_back(static_cast<int>(to_integer(s)));
    return out;
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"experiment.name", [](ExperimentConfig& c, const std::string& v) { c.name = v; }},
        {"experiment.seed",
         [](ExperimentConfig& c, const std::string& v) {
             const std::string t = trim(v);
             std::uint64_t s = 0;
             const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), s);
             if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
                 throw ValidationError("expected an unsigned integer, got '" + t + "'");
             c.seed = s;
         }},
        {"grid.dim", [](ExperimentConfig& c, const std::string& v) { c.dim = static_cast<int>(to_integer(v)); }},
        {"grid.n", [](ExperimentConfig& c, const std::string& v) { c.n = static_cast<int>(to_integer(v)); }},
        {"grid.length", [](ExperimentConfig& c, const std::string& v) { c.length = to_number(v); }},
        {"partition.type", [](ExperimentConfig& c, const std::string& v) { c.partition_type = v; }},
        {"partition.intervals",
         [](ExperimentConfig& c, const std::string& v) { c.intervals = static_cast<int>(to_integer(v)); }},
        {"partition.horizon", [](ExperimentConfig& c, const std::string& v) { c.horizon = to_number(v); }},
        {"partition.ratio", [](ExperimentConfig& c, const std::string& v) { c.ratio = to_number(v); }},
        {"profile.spec", [](ExperimentConfig& c, const std::string& v) { c.profile = v; }},
        {"coefficients.scale", [](ExperimentConfig& c, const std::string& v) { c.coefficient_scale = to_number(v); }},
        {"initial.spec", [](ExperimentConfig& c, const std::string& v) { c.initial = v; }},
        {"forcing.time", [](ExperimentConfig& c, const std::string& v) { c.forcing_time = v; }},
        {"forcing.shape", [](ExperimentConfig& c, const std::string& v) { c.forcing_shape = v; }},
        {"theorem.n", [](ExperimentConfig& c, const std::string& v) { c.smoothness = to_number(v); }},
        {"theorem.p", [](ExperimentConfig& c, const std::string& v) { c.p = to_number(v); }},
        {"theorem.gamma", [](ExperimentConfig& c, const std::string& v) { c.gammas = parse_number_list(v); }},
        {"theorem.eps", [](ExperimentConfig& c, const std::string& v) { c.eps = parse_number_list(v); }},
        {"theorem.h_grid",
         [](ExperimentConfig& c, const std::string& v) {
             parse_number_list(v);
             c.h_grid = v;
         }},
        {"theorem.t0", [](ExperimentConfig& c, const std::string& v) { c.t0 = to_number(v); }},
        {"theorem.k", [](ExperimentConfig& c, const std::string& v) { c.blocks = int_list(v); }},
        {"theorem.t_samples",
         [](ExperimentConfig& c, const std::string& v) {
             parse_number_list(v);
             c.t_samples = v;
         }},
        {"oracle.samples",
         [](ExperimentConfig& c, const std::string& v) {
             const long long s = to_integer(v);
             if (s < 0) throw ValidationError("sample count must be nonnegative");
             c.samples = static_cast<std::size_t>(s);
         }},
        {"oracle.theta", [](ExperimentConfig& c, const std::string& v) { c.theta = to_number(v); }},
        {"oracle.sampling", [](ExperimentConfig& c, const std::string& v) { c.sampling = v; }},
        {"oracle.probes", [](ExperimentConfig& c, const std::string& v) { c.probes = parse_number_list(v); }},
        {"oracle.fd_levels", [](ExperimentConfig& c, const std::string& v) { c.fd_levels = int_list(v); }},
    };
    return table;
}

bool is_entry_key(const std::string& key) {
    return key.size() == 3 && key[0] == 'a' && key[1] >= '1' && key[1] <= '3' && key[2] >= '1' && key[2] <= '3';
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

std::string to_string(const Diagnostic& d) {
    std::string s = d.line > 0 ? "line " + std::to_string(d.line) + ": " : "";
    return s + d.field + ": " + d.message;
}

std::vector<double> parse_number_list(const std::string& text) {
    const std::string t = trim(text);
    if (t.rfind("logspace", 0) == 0) {
        const SpecCall call = parse_spec_call(t);
        if (call.args.size() != 3) throw ValidationError("logspace takes (a, b, count)");
        const double a = call.args[0].as_number(), b = call.args[1].as_number();
        const double count = call.args[2].as_number();
        if (!(a > 0.0 && b > 0.0) || count < 2 || count != std::floor(count))
            throw ValidationError("logspace needs positive ends and an integer count >= 2");
        std::vector<double> out;
        const int n = static_cast<int>(count);
        for (int i = 0; i < n; ++i) out.push_back(a * std::pow(b / a, static_cast<double>(i) / (n - 1)));
        out.front() = a;
        out.back() = b;
        return out;
    }
    std::vector<double> out;
    for (const auto& s : split_list(t)) out.push_back(to_number(s));
    if (out.empty()) throw ValidationError("empty number list");
    return out;
}

ParsedConfig parse_config(const std::string& text) {
    ParsedConfig parsed;
    std::istringstream in(text);
    std::string raw, section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                parsed.diagnostics.push_back({line_no, line, "unterminated section header"});
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            static const char* known[] = {"experiment", "grid",    "partition", "profile", "coefficients",
                                          "initial",    "forcing", "theorem",   "oracle"};
            if (std::find(std::begin(known), std::end(known), section) == std::end(known))
                parsed.diagnostics.push_back({line_no, "[" + section + "]", "unknown section"});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            parsed.diagnostics.push_back({line_no, section, "expected 'key = value'"});
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string field = section + "." + key;
        if (section.empty()) {
            parsed.diagnostics.push_back({line_no, key, "key outside of a section"});
            continue;
        }
        if (parsed.lines.count(field)) {
            parsed.diagnostics.push_back({line_no, field, "duplicate key"});
            continue;
        }
        parsed.lines[field] = line_no;
        try {
            if (section == "coefficients" && is_entry_key(key)) {
                parsed.config.coefficient_entries[key] = value;
                continue;
            }
            const auto it = setters().find(field);
            if (it == setters().end()) {
                parsed.diagnostics.push_back({line_no, field, "unknown key"});
                continue;
            }
            it->second(parsed.config, value);
        } catch (const std::exception& e) {
            parsed.diagnostics.push_back({line_no, field, e.what()});
        }
    }
    return parsed;
}

ParsedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ParsedConfig p;
        p.diagnostics.push_back({0, path, "cannot open config file"});
        return p;
    }
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str());
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "[experiment]\nname = " << c.name << "\nseed = " << c.seed << "\n\n";
    os << "[grid]\ndim = " << c.dim << "\nn = " << c.n << "\nlength = " << fmt(c.length) << "\n\n";
    os << "[partition]\ntype = " << c.partition_type << "\nintervals = " << c.intervals
       << "\nhorizon = " << fmt(c.horizon) << "\n";
    if (c.ratio) os << "ratio = " << fmt(*c.ratio) << "\n";
    os << "\n[profile]\nspec = " << c.profile << "\n\n";
    os << "[coefficients]\nscale = " << fmt(c.coefficient_scale) << "\n";
    for (const auto& [k, v] : c.coefficient_entries) os << k << " = " << v << "\n";
    os << "\n[initial]\nspec = " << c.initial << "\n\n";
    os << "[forcing]\ntime = " << c.forcing_time << "\n";
    if (!c.forcing_shape.empty()) os << "shape = " << c.forcing_shape << "\n";
    os << "\n[theorem]\nn = " << fmt(c.smoothness) << "\np = " << fmt(c.p) << "\ngamma = " << join(c.gammas)
       << "\neps = " << join(c.eps) << "\nh_grid = " << c.h_grid << "\nt0 = " << fmt(c.t0) << "\nk = " << join(c.blocks)
       << "\nt_samples = " << c.t_samples << "\n\n";
    os << "[oracle]\nsamples = " << c.samples << "\ntheta = " << fmt(c.theta) << "\nsampling = " << c.sampling
       << "\nprobes = " << join(c.probes) << "\nfd_levels = " << join(c.fd_levels) << "\n";
    return os.str();
}

// -------------------------------------------------------------------- builders

GridSpec build_grid(const ExperimentConfig& c) {
    GridSpec g{c.dim, c.n, c.length};
    g.validate();
    return g;
}

TimePartition build_partition(const ExperimentConfig& c) {
    if (c.partition_type == "uniform") return TimePartition::uniform(c.intervals, c.horizon);
    if (c.partition_type == "geometric") return TimePartition::geometric(c.intervals, c.horizon, c.ratio);
    throw ValidationError("partition type must be 'uniform' or 'geometric'");
}

DegeneracyProfile build_profile(const ExperimentConfig& c) {
    return parse_profile(c.profile, std::max({c.horizon, c.t0, 1.0}));
}

CoefficientPath build_path(const ExperimentConfig& c) {
    const int d = c.dim;
    if (c.coefficient_entries.empty()) {
        if (!(c.coefficient_scale >= 0.0)) throw ValidationError("coefficient scale must be nonnegative");
        return CoefficientPath::scalar_times(build_profile(c).delta().scaled(c.coefficient_scale),
                                             Eigen::MatrixXd::Identity(d, d));
    }
    std::vector<ScalarPath> entries;
    for (int i = 1; i <= d; ++i)
        for (int j = 1; j <= d; ++j) {
            const std::string key = "a" + std::to_string(i) + std::to_string(j);
            const std::string mirror = "a" + std::to_string(j) + std::to_string(i);
            if (auto it = c.coefficient_entries.find(key); it != c.coefficient_entries.end())
                entries.push_back(parse_scalar_path(it->second));
            else if (auto m = c.coefficient_entries.find(mirror); m != c.coefficient_entries.end())
                entries.push_back(parse_scalar_path(m->second));
            else if (i == j)
                throw ValidationError("missing diagonal coefficient " + key);
            else
                entries.push_back(constant_path(0.0));
        }
    for (const auto& [key, v] : c.coefficient_entries)
        if (key[1] - '0' > d || key[2] - '0' > d) throw ValidationError("coefficient " + key + " exceeds grid dimension");
    return CoefficientPath::from_entries(d, std::move(entries));
}

SpectralField build_field(const std::string& spec, const GridSpec& grid, double p) {
    const SpecCall call = parse_spec_call(spec);
    auto arity = [&](std::size_t lo, std::size_t hi) {
        if (call.args.size() < lo || call.args.size() > hi)
            throw ValidationError(call.name + " takes between " + std::to_string(lo) + " and " + std::to_string(hi) +
                                  " arguments");
    };
    auto integer = [](const SpecValue& v) {
        const double x = v.as_number();
        if (x != std::floor(x)) throw ValidationError("expected an integer argument");
        return x;
    };
    if (call.name == "zero") {
        arity(0, 0);
        return SpectralField::zero(grid);
    }
    if (call.name == "gaussian") {
        arity(1, 1);
        return gaussian_data(grid, call.args[0].as_number());
    }
    if (call.name == "mode") {
        arity(1, 3);
        std::vector<int> k;
        for (const auto& a : call.args) k.push_back(static_cast<int>(integer(a)));
        return mode_data(grid, k);
    }
    if (call.name == "rough") {
        arity(1, 3);
        RoughSpec r{call.args[0].as_number(), p, 0, -1};
        if (call.args.size() > 1) {
            const double seed = integer(call.args[1]);
            if (seed < 0) throw ValidationError("rough seed must be nonnegative");
            r.seed = static_cast<std::uint64_t>(seed);
        }
        if (call.args.size() > 2) r.j_max = static_cast<int>(integer(call.args[2]));
        return rough_data(grid, r);
    }
    throw ValidationError("unknown field spec '" + call.name + "' (zero, gaussian, mode, rough)");
}

SpectralField build_initial(const ExperimentConfig& c) { return build_field(c.initial, build_grid(c), c.p); }

Forcing build_forcing(const ExperimentConfig& c) {
    if (c.forcing_shape.empty()) return {};
    const SpectralField shape = build_field(c.forcing_shape, build_grid(c), c.p);
    const ScalarPath time = parse_scalar_path(c.forcing_time);
    return [shape, time](double t) { return time(t) * shape; };
}

// ------------------------------------------------------------------ validation

std::vector<Diagnostic> validate(const ExperimentConfig& c, const std::map<std::string, int>& lines) {
    std::vector<Diagnostic> out;
    auto add = [&](const std::string& field, const std::string& message) {
        const auto it = lines.find(field);
        out.push_back({it == lines.end() ? 0 : it->second, field, message});
    };
    auto attempt = [&](const std::string& field, auto&& fn) {
        try {
            fn();
            return true;
        } catch (const std::exception& e) {
            add(field, e.what());
            return false;
        }
    };

    bool grid_ok = true;
    if (c.dim < 1 || c.dim > 3) {
        add("grid.dim", "dimension must be 1, 2 or 3");
        grid_ok = false;
    }
    if (!is_power_of_two(c.n) || c.n < 4) {
        add("grid.n", "n = " + std::to_string(c.n) + " is not a power of two >= 4");
        grid_ok = false;
    }
    if (!(c.length > 0.0)) {
        add("grid.length", "length must be positive");
        grid_ok = false;
    }
    if (grid_ok && GridSpec{c.dim, c.n, c.length}.j_max() < 1) {
        add("grid.n", "grid too coarse for a Littlewood-Paley family (need pi*n/L >= 4)");
        grid_ok = false;
    }

    attempt("partition.type", [&] { build_partition(c); });
    const bool profile_ok = attempt("profile.spec", [&] { build_profile(c); });
    if (grid_ok && profile_ok) {
        const std::string field = c.coefficient_entries.empty() ? "coefficients.scale" : "coefficients";
        attempt(field, [&] { build_path(c); });
    }
    if (!(c.p > 1.0) || !std::isfinite(c.p)) add("theorem.p", "p must be finite and > 1");

    if (grid_ok) {
        const GridSpec g{c.dim, c.n, c.length};
        const double p = c.p > 1.0 ? c.p : 2.0;
        attempt("initial.spec", [&] { build_field(c.initial, g, p); });
        if (!c.forcing_shape.empty()) attempt("forcing.shape", [&] { build_field(c.forcing_shape, g, p); });
        const int j_max = g.j_max();
        for (int k : c.blocks)
            if (k < g.j_min() || k > j_max) {
                add("theorem.k", "block " + std::to_string(k) + " outside the grid's range [" +
                                     std::to_string(g.j_min()) + ", " + std::to_string(j_max) + "]");
                break;
            }
        for (int level : c.fd_levels)
            if (!is_power_of_two(level) || level < 4) {
                add("oracle.fd_levels", "level " + std::to_string(level) + " is not a power of two >= 4");
                break;
            }
    }
    if (!c.forcing_shape.empty()) attempt("forcing.time", [&] { parse_scalar_path(c.forcing_time); });

    for (std::size_t i = 0; i < c.eps.size(); ++i) {
        if (!(c.eps[i] > 0.0) || (i > 0 && !(c.eps[i] < c.eps[i - 1]))) {
            add("theorem.eps", "eps values must be positive and decreasing");
            break;
        }
    }
    if (c.eps.empty()) add("theorem.eps", "empty eps list");
    for (double gamma : c.gammas)
        if (!(gamma >= 0.0)) add("theorem.gamma", "gamma must be >= 0");
    attempt("theorem.h_grid", [&] {
        for (double h : parse_number_list(c.h_grid))
            if (!(h > 0.0)) throw ValidationError("h values must be positive");
    });
    attempt("theorem.t_samples", [&] {
        for (double t : parse_number_list(c.t_samples))
            if (!(t > 0.0)) throw ValidationError("time samples must be positive");
    });
    if (!(c.t0 > 0.0)) add("theorem.t0", "t0 must be positive");
    if (c.samples < 1000) add("oracle.samples", "at least 1000 samples are required");
    if (!(c.theta >= 0.5 && c.theta <= 1.0)) add("oracle.theta", "theta must lie in [1/2, 1]");
    if (c.sampling != "theta_point" && c.sampling != "step_average")
        add("oracle.sampling", "sampling must be 'theta_point' or 'step_average'");
    if (c.probes.size() % static_cast<std::size_t>(std::clamp(c.dim, 1, 3)) != 0)
        add("oracle.probes", "probe coordinates must come in groups of d");
    return out;
}

}  // namespace degenpar
