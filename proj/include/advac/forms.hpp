#pragma once

#include "advac/problem.hpp"
#include "advac/space.hpp"

#include <Eigen/Sparse>

namespace advac {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Double-well derivative f(u) = 2u(1 - u)(1 - 2u).
inline double nonlinearity(double u) { return 2.0 * u * (1.0 - u) * (1.0 - 2.0 * u); }
inline double nonlinearity_derivative(double u) { return 2.0 - 12.0 * u + 12.0 * u * u; }

/// The four parts of the SIPG bilinear form, row = test function.
struct BilinearParts {
    SparseMatrix diffusion_reaction; // D_h
    SparseMatrix convection;         // O_h (upwinded)
    SparseMatrix consistency;        // K_h
    SparseMatrix penalty;            // J_h
};

struct AssembledSystem {
    SparseMatrix stiffness;
    Eigen::VectorXd rhs;
    BilinearParts parts;
};

/// Throws CoercivityError if 1/tau + min div(V)/2 <= 0 on the space's quadrature points.
void check_coercivity(const DGSpace& space, const ProblemSpec& spec);

BilinearParts assemble_bilinear_parts(const DGSpace& space, const ProblemSpec& spec);

/// D_h + O_h + K_h + J_h.
SparseMatrix assemble_bilinear(const DGSpace& space, const ProblemSpec& spec);

/// l(v) = sum_E int_E (u_prev / tau + source) v.
Eigen::VectorXd assemble_rhs(const DGSpace& space, const ProblemSpec& spec, const DGFunction& u_prev);

AssembledSystem assemble_system(const DGSpace& space, const ProblemSpec& spec, const DGFunction& u_prev);

/// Reaction vector N(u)_i = int (1/eps) f(u) phi_i and its block-diagonal Jacobian.
void assemble_reaction(const DGSpace& space, const ProblemSpec& spec, const Eigen::VectorXd& u,
                       Eigen::VectorXd& values, SparseMatrix* jacobian);

struct ResidualJacobian {
    Eigen::VectorXd residual;
    SparseMatrix jacobian;
};

/// R(u) = A u + N(u) - b and dR/du = A + dN/du.
ResidualJacobian assemble_residual_and_jacobian(const DGSpace& space, const ProblemSpec& spec, const DGFunction& u,
                                                const DGFunction& u_prev);
/// Same, reusing an assembled system on the same space.
ResidualJacobian residual_and_jacobian(const AssembledSystem& system, const DGSpace& space, const ProblemSpec& spec,
                                       const Eigen::VectorXd& u, bool with_jacobian = true);

/// a_h(v, v) for random v must be positive; returns the smallest Rayleigh quotient seen.
double coercivity_probe(const SparseMatrix& stiffness, int samples, unsigned seed);

/// Coordinate-format text dump "row col value" (one entry per line, 0-based).
void write_matrix_coo(const std::string& path, const SparseMatrix& matrix);

} // namespace advac
