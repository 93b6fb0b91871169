#include "advac/quadrature.hpp"

#include "advac/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace advac {

namespace {

// Value and derivative of the Legendre polynomial P_n at x.
std::pair<double, double> legendre(int n, double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
    }
    return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

} // namespace

LineRule gauss_legendre(int n) {
    if (n < 1) throw InvalidArgument("gauss_legendre: need at least one point");
    LineRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    rule.degree = 2 * n - 1;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = legendre(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = legendre(n, x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // [-1,1] -> [0,1]
        rule.points[i] = 0.5 * (1.0 - x);
        rule.points[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = 0.5 * w;
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

LineRule line_rule(int degree) {
    const int n = std::max(1, (degree + 2) / 2);
    return gauss_legendre(n);
}

TriangleRule triangle_rule(int degree) {
    // xi = s (1 - t), eta = t; the Jacobian (1 - t) raises the degree in t by one
    const LineRule gs = line_rule(degree);
    const LineRule gt = line_rule(degree + 1);
    TriangleRule rule;
    rule.degree = degree;
    for (std::size_t j = 0; j < gt.size(); ++j) {
        const double t = gt.points[j];
        for (std::size_t i = 0; i < gs.size(); ++i) {
            const double s = gs.points[i];
            const double xi = s * (1.0 - t);
            const double eta = t;
            rule.points.push_back({1.0 - xi - eta, xi, eta});
            rule.weights.push_back(gs.weights[i] * gt.weights[j] * (1.0 - t));
        }
    }
    return rule;
}

} // namespace advac
