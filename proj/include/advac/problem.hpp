#pragma once

#include "advac/mesh.hpp"

#include <functional>
#include <string>

namespace advac {

using ScalarField = std::function<double(Point)>;

/// Prescribed velocity with its analytic divergence.
struct VelocityField {
    std::string name = "zero";
    std::function<Point(Point)> value = [](Point) { return Point{}; };
    std::function<double(Point)> divergence = [](Point) { return 0.0; };

    Point operator()(Point p) const { return value(p); }
};

VelocityField zero_velocity();
/// V = (v0 x, v0 y), div V = 2 v0.
VelocityField expanding_velocity(double v0);
/// V = (0, -v0 y), div V = -v0.
VelocityField sheer_velocity(double v0);
/// V = (c1 + a11 x + a12 y, c2 + a21 x + a22 y).
VelocityField affine_velocity(double c1, double c2, double a11, double a12, double a21, double a22);

/// 1 inside x^2 + y^2 <= radius_sq, 0 outside.
ScalarField disk_indicator(double radius_sq);
/// 1 on [-half_width, half_width]^2, 0 outside.
ScalarField square_indicator(double half_width);
ScalarField constant_field(double value);

/// Data of one advective Allen-Cahn run on [-1,1]^2 with homogeneous Neumann data.
struct ProblemSpec {
    double epsilon = 1e-3;
    VelocityField velocity;
    ScalarField initial_condition = constant_field(0.0);
    /// Sub-division depth for integrating the initial condition; positive for
    /// piecewise constant data such as indicator functions.
    int initial_projection_depth = 0;
    /// Optional extra load added to u_prev / tau (manufactured problems).
    ScalarField source;
    /// Optional boundary flux eps du/dn as a function of (point, outward
    /// normal); homogeneous when empty.
    std::function<double(Point, Point)> neumann_flux;
    /// false switches the double-well reaction off (linear problem).
    bool reaction = true;
    double tau = 1e-3;
    double final_time = 0.06;
    double sigma = 10.0;
    int degree = 1;
    double stol_r = 1e-2;
    double stol_c = 1e-5;
    double stol_0 = 1e-4;
    int max_prerefine = 8;

    /// Throws ConfigError on any violated precondition.
    void validate() const;
    /// J = T / tau; throws if T is not an integer multiple of tau.
    int num_steps() const;
};

/// 10 for q = 1, 3 q (q + 1) + 1 otherwise.
double default_sigma(int degree);

} // namespace advac
