#include "advac/problem.hpp"

#include "advac/errors.hpp"

#include <cmath>

#include <fmt/core.h>

namespace advac {

VelocityField zero_velocity() { return VelocityField{}; }

VelocityField expanding_velocity(double v0) {
    return {"expanding", [v0](Point p) { return Point{v0 * p.x, v0 * p.y}; },
            [v0](Point) { return 2.0 * v0; }};
}

VelocityField sheer_velocity(double v0) {
    return {"sheer", [v0](Point p) { return Point{0.0, -v0 * p.y}; }, [v0](Point) { return -v0; }};
}

VelocityField affine_velocity(double c1, double c2, double a11, double a12, double a21, double a22) {
    return {"affine",
            [=](Point p) { return Point{c1 + a11 * p.x + a12 * p.y, c2 + a21 * p.x + a22 * p.y}; },
            [=](Point) { return a11 + a22; }};
}

ScalarField disk_indicator(double radius_sq) {
    return [radius_sq](Point p) { return p.x * p.x + p.y * p.y <= radius_sq ? 1.0 : 0.0; };
}

ScalarField square_indicator(double half_width) {
    return [half_width](Point p) {
        return (std::abs(p.x) <= half_width && std::abs(p.y) <= half_width) ? 1.0 : 0.0;
    };
}

ScalarField constant_field(double value) {
    return [value](Point) { return value; };
}

double default_sigma(int degree) { return degree == 1 ? 10.0 : 3.0 * degree * (degree + 1) + 1.0; }

void ProblemSpec::validate() const {
    if (!(epsilon > 0.0)) throw ConfigError(fmt::format("epsilon must be positive, got {}", epsilon));
    if (!(tau > 0.0)) throw ConfigError(fmt::format("tau must be positive, got {}", tau));
    if (!(sigma > 0.0)) throw ConfigError(fmt::format("sigma must be positive, got {}", sigma));
    if (!(final_time >= tau)) throw ConfigError(fmt::format("final time {} is smaller than tau {}", final_time, tau));
    if (degree < 1 || degree > 4) throw ConfigError(fmt::format("degree must be in [1, 4], got {}", degree));
    if (!(stol_c < stol_r)) throw ConfigError(fmt::format("stol_c ({}) must be below stol_r ({})", stol_c, stol_r));
    if (!(stol_0 > 0.0)) throw ConfigError("stol_0 must be positive");
    if (max_prerefine < 0) throw ConfigError("max_prerefine must be non-negative");
    if (!initial_condition) throw ConfigError("missing initial condition");
    num_steps();
}

int ProblemSpec::num_steps() const {
    const double ratio = final_time / tau;
    const double steps = std::round(ratio);
    if (std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio)) {
        throw ConfigError(fmt::format("final time {} is not an integer multiple of tau {}", final_time, tau));
    }
    return static_cast<int>(steps);
}

} // namespace advac
