#include "advac/config.hpp"

#include "advac/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/core.h>

namespace advac {

namespace {

constexpr double half_pi = std::numbers::pi / 2.0;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError(fmt::format("{}: '{}' is not a number", key, v));
    }
    return out;
}

int parse_int(const std::string& key, const std::string& v) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError(fmt::format("{}: '{}' is not an integer", key, v));
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError(fmt::format("{}: expected true or false, got '{}'", key, v));
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    if (v.empty()) return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    return out;
}

struct Field {
    const char* key;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

template <class T>
Field field(const char* key, T ExperimentConfig::*member) {
    Field f{key, {}, {}};
    if constexpr (std::is_same_v<T, std::string>) {
        f.get = [member](const ExperimentConfig& c) { return c.*member; };
        f.set = [member](ExperimentConfig& c, const std::string& v) { c.*member = v; };
    } else if constexpr (std::is_same_v<T, bool>) {
        f.get = [member](const ExperimentConfig& c) { return std::string(c.*member ? "true" : "false"); };
        f.set = [member, key](ExperimentConfig& c, const std::string& v) { c.*member = parse_bool(key, v); };
    } else if constexpr (std::is_same_v<T, int>) {
        f.get = [member](const ExperimentConfig& c) { return fmt::format("{}", c.*member); };
        f.set = [member, key](ExperimentConfig& c, const std::string& v) { c.*member = parse_int(key, v); };
    } else {
        static_assert(std::is_same_v<T, double>);
        f.get = [member](const ExperimentConfig& c) { return fmt::format("{}", c.*member); };
        f.set = [member, key](ExperimentConfig& c, const std::string& v) { c.*member = parse_double(key, v); };
    }
    return f;
}

Field affine_field(const char* key, int i) {
    return {key, [i](const ExperimentConfig& c) { return fmt::format("{}", c.affine[i]); },
            [i, key](ExperimentConfig& c, const std::string& v) { c.affine[i] = parse_double(key, v); }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        field("problem", &ExperimentConfig::problem),
        field("mode", &ExperimentConfig::mode),
        field("velocity", &ExperimentConfig::velocity),
        field("v0", &ExperimentConfig::v0),
        affine_field("affine_c1", 0),
        affine_field("affine_c2", 1),
        affine_field("affine_a11", 2),
        affine_field("affine_a12", 3),
        affine_field("affine_a21", 4),
        affine_field("affine_a22", 5),
        field("initial", &ExperimentConfig::initial),
        field("initial_param", &ExperimentConfig::initial_param),
        field("initial_projection_depth", &ExperimentConfig::initial_projection_depth),
        field("source", &ExperimentConfig::source),
        field("reaction", &ExperimentConfig::reaction),
        field("epsilon", &ExperimentConfig::epsilon),
        field("tau", &ExperimentConfig::tau),
        field("final_time", &ExperimentConfig::final_time),
        field("sigma", &ExperimentConfig::sigma),
        field("degree", &ExperimentConfig::degree),
        field("stol_r", &ExperimentConfig::stol_r),
        field("stol_c", &ExperimentConfig::stol_c),
        field("stol_0", &ExperimentConfig::stol_0),
        field("max_prerefine", &ExperimentConfig::max_prerefine),
        field("initial_n", &ExperimentConfig::initial_n),
        field("uniform_n", &ExperimentConfig::uniform_n),
        field("max_adapt_cycles", &ExperimentConfig::max_adapt_cycles),
        {"snapshot_times",
         [](const ExperimentConfig& c) {
             std::string s;
             for (std::size_t i = 0; i < c.snapshot_times.size(); ++i) {
                 s += fmt::format("{}{}", i ? "," : "", c.snapshot_times[i]);
             }
             return s;
         },
         [](ExperimentConfig& c, const std::string& v) { c.snapshot_times = parse_list("snapshot_times", v); }},
        field("output_dir", &ExperimentConfig::output_dir),
    };
    return table;
}

ExperimentConfig flow_defaults() {
    ExperimentConfig c;
    c.epsilon = 1e-3;
    c.tau = 1e-3;
    c.final_time = 0.06;
    c.sigma = 10.0;
    c.degree = 1;
    c.stol_r = 1e-2;
    c.stol_c = 1e-5;
    c.stol_0 = 1e-4;
    c.initial_projection_depth = 6;
    c.initial_n = 4;
    return c;
}

void apply_desk_scale(ExperimentConfig& c) {
    c.final_time = 0.02;
    c.uniform_n = 16;
    c.snapshot_times = {0.0, 0.01, 0.02};
}

} // namespace

double manufactured_exact(Point p) { return std::cos(half_pi * p.x) * std::cos(half_pi * p.y); }

Point manufactured_exact_gradient(Point p) {
    return {-half_pi * std::sin(half_pi * p.x) * std::cos(half_pi * p.y),
            -half_pi * std::cos(half_pi * p.x) * std::sin(half_pi * p.y)};
}

ExperimentConfig builtin_expanding(Scale scale) {
    ExperimentConfig c = flow_defaults();
    c.problem = "expanding";
    c.velocity = "expanding";
    c.v0 = 10.0;
    c.initial = "disk";
    c.initial_param = 0.3;
    c.uniform_n = 64;
    c.snapshot_times = {0.0, 0.03, 0.06};
    if (scale == Scale::desk) apply_desk_scale(c);
    return c;
}

ExperimentConfig builtin_sheer(Scale scale) {
    ExperimentConfig c = flow_defaults();
    c.problem = "sheer";
    c.velocity = "sheer";
    c.v0 = 100.0;
    c.epsilon = 0.01;
    c.initial = "square";
    c.initial_param = 0.1;
    c.uniform_n = 32;
    c.snapshot_times = {0.0, 0.01, 0.06};
    if (scale == Scale::desk) apply_desk_scale(c);
    return c;
}

ExperimentConfig builtin_manufactured(const std::string& kind) {
    if (kind != "linear" && kind != "nonlinear") {
        throw ConfigError(fmt::format("unknown manufactured problem kind '{}'", kind));
    }
    ExperimentConfig c;
    c.problem = "manufactured-" + kind;
    c.mode = "uniform";
    c.velocity = "affine";
    c.affine = {1.0, 0.5, 0.0, 0.0, 0.0, 0.0};
    c.initial = "constant";
    c.initial_param = 0.0;
    c.source = "manufactured";
    c.reaction = kind == "nonlinear";
    // eps = tau = 1 keeps 1/tau + f'(u)/eps >= 0, so the one-step problem has a unique solution
    c.epsilon = 1.0;
    c.tau = 1.0;
    c.final_time = 1.0;
    c.sigma = 10.0;
    c.initial_n = 4;
    c.uniform_n = 4;
    c.snapshot_times = {1.0};
    return c;
}

ExperimentConfig builtin(const std::string& problem, Scale scale) {
    if (problem == "expanding") return builtin_expanding(scale);
    if (problem == "sheer") return builtin_sheer(scale);
    if (problem == "manufactured-linear") return builtin_manufactured("linear");
    if (problem == "manufactured-nonlinear") return builtin_manufactured("nonlinear");
    throw ConfigError(fmt::format("unknown problem '{}'", problem));
}

std::string serialize(const ExperimentConfig& config) {
    std::string out;
    for (const Field& f : fields()) out += fmt::format("{} = {}\n", f.key, f.get(config));
    return out;
}

void set_key(ExperimentConfig& config, const std::string& key, const std::string& value) {
    for (const Field& f : fields()) {
        if (key == f.key) {
            f.set(config, value);
            return;
        }
    }
    throw ConfigError(fmt::format("unknown config key '{}'", key));
}

ExperimentConfig parse_config(const std::string& text, const ExperimentConfig& base) {
    ExperimentConfig c = base;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected key = value", lineno));
        const std::string key = trim(t.substr(0, eq));
        if (!seen.insert(key).second) throw ConfigError(fmt::format("line {}: duplicate key '{}'", lineno, key));
        set_key(c, key, trim(t.substr(eq + 1)));
    }
    return c;
}

ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot read config file {}", path));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), base);
}

ProblemSpec to_problem_spec(const ExperimentConfig& c) {
    ProblemSpec s;
    if (c.velocity == "zero") {
        s.velocity = zero_velocity();
    } else if (c.velocity == "expanding") {
        s.velocity = expanding_velocity(c.v0);
    } else if (c.velocity == "sheer") {
        s.velocity = sheer_velocity(c.v0);
    } else if (c.velocity == "affine") {
        const auto& a = c.affine;
        s.velocity = affine_velocity(a[0], a[1], a[2], a[3], a[4], a[5]);
    } else {
        throw ConfigError(fmt::format("unknown velocity '{}'", c.velocity));
    }

    if (c.initial == "constant") {
        s.initial_condition = constant_field(c.initial_param);
    } else if (c.initial == "disk") {
        s.initial_condition = disk_indicator(c.initial_param);
    } else if (c.initial == "square") {
        s.initial_condition = square_indicator(c.initial_param);
    } else {
        throw ConfigError(fmt::format("unknown initial condition '{}'", c.initial));
    }
    s.initial_projection_depth = c.initial_projection_depth;
    s.reaction = c.reaction;
    s.epsilon = c.epsilon;
    s.tau = c.tau;
    s.final_time = c.final_time;
    s.sigma = c.sigma;
    s.degree = c.degree;
    s.stol_r = c.stol_r;
    s.stol_c = c.stol_c;
    s.stol_0 = c.stol_0;
    s.max_prerefine = c.max_prerefine;

    if (c.source == "manufactured") {
        // alpha u - eps lap u + V . grad u (+ f(u) / eps), with -lap u = (pi^2 / 2) u,
        // minus the initial state carried by u_prev / tau.
        const VelocityField v = s.velocity;
        const double eps = c.epsilon;
        const double tau = c.tau;
        const bool reaction = c.reaction;
        const ScalarField g = s.initial_condition;
        s.source = [=](Point p) {
            const double u = manufactured_exact(p);
            const Point gu = manufactured_exact_gradient(p);
            double val = (1.0 / tau + v.divergence(p)) * u + eps * 2.0 * half_pi * half_pi * u + dot(v(p), gu);
            if (reaction) val += 2.0 * u * (1.0 - u) * (1.0 - 2.0 * u) / eps;
            return val - g(p) / tau;
        };
        s.neumann_flux = [eps](Point p, Point n) { return eps * dot(manufactured_exact_gradient(p), n); };
    } else if (c.source != "none") {
        throw ConfigError(fmt::format("unknown source '{}'", c.source));
    }
    s.validate();
    return s;
}

void validate(const ExperimentConfig& c) {
    const ProblemSpec s = to_problem_spec(c);
    if (c.mode != "adaptive" && c.mode != "uniform") {
        throw ConfigError(fmt::format("mode must be adaptive or uniform, got '{}'", c.mode));
    }
    if (c.initial_n < 1 || c.uniform_n < 1) throw ConfigError("initial_n and uniform_n must be positive");
    if (c.max_adapt_cycles < 1) throw ConfigError("max_adapt_cycles must be at least 1");
    if (c.initial_projection_depth < 0) throw ConfigError("initial_projection_depth must be non-negative");
    for (double t : c.snapshot_times) {
        if (!(t >= 0.0 && t <= c.final_time + 1e-12)) {
            throw ConfigError(fmt::format("snapshot time {} lies outside [0, {}]", t, c.final_time));
        }
        const double k = t / c.tau;
        if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k)) {
            throw ConfigError(fmt::format("snapshot time {} is not a multiple of tau", t));
        }
    }
    (void)s;
}

} // namespace advac
