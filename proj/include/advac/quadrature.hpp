#pragma once

#include <array>
#include <vector>

namespace advac {

/// Rule on the reference triangle {xi >= 0, eta >= 0, xi + eta <= 1}.
/// Points are barycentric triples (1 - xi - eta, xi, eta); weights sum to 1/2.
struct TriangleRule {
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
    int degree = 0;

    double xi(std::size_t q) const { return points[q][1]; }
    double eta(std::size_t q) const { return points[q][2]; }
    std::size_t size() const { return weights.size(); }
};

/// Rule on [0, 1]; weights sum to 1.
struct LineRule {
    std::vector<double> points;
    std::vector<double> weights;
    int degree = 0;

    std::size_t size() const { return weights.size(); }
};

/// n-point Gauss-Legendre rule mapped to [0, 1], exact to degree 2n - 1.
LineRule gauss_legendre(int n);

/// Smallest Gauss-Legendre rule exact for polynomials of the given degree.
LineRule line_rule(int degree);

/// Collapsed (Duffy) tensor Gauss rule exact for polynomials of the given
/// total degree on the reference triangle.
TriangleRule triangle_rule(int degree);

} // namespace advac
