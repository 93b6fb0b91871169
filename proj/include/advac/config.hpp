#pragma once

#include "advac/problem.hpp"

#include <array>
#include <string>
#include <vector>

namespace advac {

enum class Scale { desk, full };

/// Everything needed to reproduce one run. Fields map one-to-one onto the
/// keys of the flat `key = value` config format.
struct ExperimentConfig {
    std::string problem = "expanding";
    std::string mode = "adaptive"; // adaptive | uniform

    std::string velocity = "zero"; // zero | expanding | sheer | affine
    double v0 = 0.0;
    std::array<double, 6> affine{}; // c1 c2 a11 a12 a21 a22

    std::string initial = "constant"; // constant | disk | square
    double initial_param = 0.0;       // value, radius^2 or half width
    int initial_projection_depth = 0;
    std::string source = "none"; // none | manufactured
    bool reaction = true;

    double epsilon = 1e-3;
    double tau = 1e-3;
    double final_time = 0.06;
    double sigma = 10.0;
    int degree = 1;
    double stol_r = 1e-2;
    double stol_c = 1e-5;
    double stol_0 = 1e-4;
    int max_prerefine = 8;

    int initial_n = 4;
    int uniform_n = 64;
    int max_adapt_cycles = 1;
    std::vector<double> snapshot_times;
    std::string output_dir = "out";
};

ExperimentConfig builtin_expanding(Scale scale = Scale::full);
/// Same adaptive settings as the expanding flow.
ExperimentConfig builtin_sheer(Scale scale = Scale::full);
/// kind: "linear" or "nonlinear". One unit backward Euler step from zero
/// whose exact discrete target is cos(pi x / 2) cos(pi y / 2).
ExperimentConfig builtin_manufactured(const std::string& kind);
/// expanding | sheer | manufactured-linear | manufactured-nonlinear
ExperimentConfig builtin(const std::string& problem, Scale scale = Scale::desk);

std::string serialize(const ExperimentConfig& config);
/// Applies the keys in `text` on top of `base`. Unknown keys, malformed
/// values and duplicate keys raise ConfigError.
ExperimentConfig parse_config(const std::string& text, const ExperimentConfig& base = {});
ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base = {});
/// Sets one key from its textual value.
void set_key(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Resolves names to fields and validates; throws ConfigError.
ProblemSpec to_problem_spec(const ExperimentConfig& config);
void validate(const ExperimentConfig& config);

/// cos(pi x / 2) cos(pi y / 2)
double manufactured_exact(Point p);
Point manufactured_exact_gradient(Point p);

} // namespace advac
