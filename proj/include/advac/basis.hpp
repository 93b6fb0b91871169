#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace advac {

/// Modal basis of P^q on the reference triangle, orthonormal in L^2 of the
/// reference element. Built by Cholesky-orthogonalising the monomials
/// xi^a eta^b (a + b <= q) against their exact Gram matrix.
class ReferenceBasis {
public:
    explicit ReferenceBasis(int degree);

    int degree() const { return degree_; }
    int size() const { return static_cast<int>(exponents_.size()); }

    Eigen::VectorXd values(double xi, double eta) const;
    /// Row i holds (d/dxi, d/deta) of basis function i.
    Eigen::MatrixX2d gradients(double xi, double eta) const;
    /// Row i holds (d2/dxi2, d2/dxi deta, d2/deta2) of basis function i.
    Eigen::MatrixX3d hessians(double xi, double eta) const;

    /// Monomial coefficients: phi_i = sum_j coefficients()(i, j) xi^a_j eta^b_j.
    const Eigen::MatrixXd& coefficients() const { return coeffs_; }
    const std::vector<std::pair<int, int>>& exponents() const { return exponents_; }

private:
    int degree_;
    std::vector<std::pair<int, int>> exponents_;
    Eigen::MatrixXd coeffs_;
};

inline int dofs_per_element(int degree) { return (degree + 1) * (degree + 2) / 2; }

/// Exact integral of xi^a eta^b over the reference triangle: a! b! / (a + b + 2)!.
double reference_monomial_integral(int a, int b);

} // namespace advac
