#include "advac/basis.hpp"

#include "advac/errors.hpp"

#include <cmath>

#include <fmt/core.h>

namespace advac {

namespace {

double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

long double factorial_l(int n) {
    long double r = 1.0L;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

} // namespace

double reference_monomial_integral(int a, int b) {
    return factorial(a) * factorial(b) / factorial(a + b + 2);
}

ReferenceBasis::ReferenceBasis(int degree) : degree_(degree) {
    if (degree < 0 || degree > 6) throw InvalidArgument(fmt::format("unsupported polynomial degree {}", degree));
    for (int d = 0; d <= degree; ++d) {
        for (int b = 0; b <= d; ++b) exponents_.emplace_back(d - b, b);
    }
    // extended precision keeps the Cholesky of the ill-conditioned monomial
    // Gram matrix accurate up to degree 6
    using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    const int n = size();
    MatrixL gram(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto [ai, bi] = exponents_[i];
            const auto [aj, bj] = exponents_[j];
            gram(i, j) = factorial_l(ai + aj) * factorial_l(bi + bj) / factorial_l(ai + aj + bi + bj + 2);
        }
    }
    const MatrixL lower = Eigen::LLT<MatrixL>(gram).matrixL();
    coeffs_ = lower.triangularView<Eigen::Lower>().solve(MatrixL::Identity(n, n)).cast<double>();
}

Eigen::VectorXd ReferenceBasis::values(double xi, double eta) const {
    Eigen::VectorXd mono(size());
    for (int j = 0; j < size(); ++j) mono[j] = ipow(xi, exponents_[j].first) * ipow(eta, exponents_[j].second);
    return coeffs_ * mono;
}

Eigen::MatrixX2d ReferenceBasis::gradients(double xi, double eta) const {
    Eigen::MatrixX2d mono(size(), 2);
    for (int j = 0; j < size(); ++j) {
        const auto [a, b] = exponents_[j];
        mono(j, 0) = a > 0 ? a * ipow(xi, a - 1) * ipow(eta, b) : 0.0;
        mono(j, 1) = b > 0 ? b * ipow(xi, a) * ipow(eta, b - 1) : 0.0;
    }
    return coeffs_ * mono;
}

Eigen::MatrixX3d ReferenceBasis::hessians(double xi, double eta) const {
    Eigen::MatrixX3d mono(size(), 3);
    for (int j = 0; j < size(); ++j) {
        const auto [a, b] = exponents_[j];
        mono(j, 0) = a > 1 ? a * (a - 1) * ipow(xi, a - 2) * ipow(eta, b) : 0.0;
        mono(j, 1) = (a > 0 && b > 0) ? a * b * ipow(xi, a - 1) * ipow(eta, b - 1) : 0.0;
        mono(j, 2) = b > 1 ? b * (b - 1) * ipow(xi, a) * ipow(eta, b - 2) : 0.0;
    }
    return coeffs_ * mono;
}

} // namespace advac
