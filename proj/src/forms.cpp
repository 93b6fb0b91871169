#include "advac/forms.hpp"

#include "advac/errors.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <random>

#include <fmt/core.h>

namespace advac {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void scatter(Triplets& out, std::size_t row_block, std::size_t col_block, int n, const Eigen::MatrixXd& local) {
    const auto r0 = static_cast<int>(row_block) * n;
    const auto c0 = static_cast<int>(col_block) * n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (local(i, j) != 0.0) out.emplace_back(r0 + i, c0 + j, local(i, j));
        }
    }
}

SparseMatrix to_sparse(const Triplets& t, std::size_t dofs) {
    SparseMatrix m(static_cast<Eigen::Index>(dofs), static_cast<Eigen::Index>(dofs));
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

Point edge_point(const Mesh& mesh, const Edge& e, double s) {
    const Point a = mesh.vertices()[e.vertices[0]];
    const Point b = mesh.vertices()[e.vertices[1]];
    return a + s * (b - a);
}

} // namespace

void check_coercivity(const DGSpace& space, const ProblemSpec& spec) {
    double min_div = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < space.num_elements(); ++k) {
        for (std::size_t q = 0; q < space.element_rule().size(); ++q) {
            min_div = std::min(min_div, spec.velocity.divergence(space.quadrature_point(k, q)));
        }
    }
    const double kappa = 1.0 / spec.tau + 0.5 * min_div;
    if (!(kappa > 0.0)) {
        throw CoercivityError(
            fmt::format("1/tau + min div(V)/2 = {} is not positive (min div(V) = {})", kappa, min_div), min_div);
    }
}

BilinearParts assemble_bilinear_parts(const DGSpace& space, const ProblemSpec& spec) {
    check_coercivity(space, spec);
    const Mesh& mesh = space.mesh();
    const int n = space.dofs_per_element();
    const double eps = spec.epsilon;
    const double zeroth = 1.0 / spec.tau; // alpha - div(V)
    const auto& rule = space.element_rule();
    const auto& table = space.basis_table();

    Triplets d_t, o_t, k_t, j_t;
    d_t.reserve(space.num_elements() * n * n);
    o_t.reserve(3 * space.num_elements() * n * n);

    for (std::size_t k = 0; k < space.num_elements(); ++k) {
        const auto& geo = space.geometry(k);
        Eigen::MatrixXd d_loc = Eigen::MatrixXd::Zero(n, n);
        Eigen::MatrixXd o_loc = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double w = space.quadrature_weight(k, q);
            const Eigen::VectorXd phi = table.row(static_cast<Eigen::Index>(q)).transpose();
            const Eigen::MatrixX2d grad = geo.physical_gradients(space.reference_gradients(q));
            const Point v = spec.velocity(space.quadrature_point(k, q));
            d_loc.noalias() += w * (eps * grad * grad.transpose() + zeroth * phi * phi.transpose());
            const Eigen::VectorXd v_dot_grad = grad.col(0) * v.x + grad.col(1) * v.y;
            o_loc.noalias() -= w * v_dot_grad * phi.transpose();
        }
        scatter(d_t, k, k, n, d_loc);
        scatter(o_t, k, k, n, o_loc);
    }

    const auto& erule = space.edge_rule();
    for (const Edge& e : mesh.edges()) {
        const std::size_t k1 = mesh.active_index(e.elements[0]);
        if (e.kind == EdgeKind::boundary) {
            Eigen::MatrixXd o11 = Eigen::MatrixXd::Zero(n, n);
            for (std::size_t q = 0; q < erule.size(); ++q) {
                const Point x = edge_point(mesh, e, erule.points[q]);
                const double beta = dot(spec.velocity(x), e.normal);
                if (beta < 0.0) continue; // inflow boundary: no term
                const double w = erule.weights[q] * e.length;
                const BasisSample s = space.sample(k1, x);
                o11.noalias() += w * beta * s.values * s.values.transpose();
            }
            scatter(o_t, k1, k1, n, o11);
            continue;
        }
        const std::size_t k2 = mesh.active_index(e.elements[1]);
        const double h_e = e.length;
        Eigen::MatrixXd o[2][2], kk[2][2], jj[2][2];
        for (auto* m : {o, kk, jj}) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) m[a][b] = Eigen::MatrixXd::Zero(n, n);
            }
        }
        for (std::size_t q = 0; q < erule.size(); ++q) {
            const Point x = edge_point(mesh, e, erule.points[q]);
            const double w = erule.weights[q] * e.length;
            const BasisSample s[2] = {space.sample(k1, x), space.sample(k2, x)};
            const Eigen::VectorXd flux[2] = {s[0].gradients.col(0) * e.normal.x + s[0].gradients.col(1) * e.normal.y,
                                             s[1].gradients.col(0) * e.normal.x + s[1].gradients.col(1) * e.normal.y};
            const double sign[2] = {1.0, -1.0};
            // upwind: beta * u_upwind * (v_1 - v_2)
            const double beta = dot(spec.velocity(x), e.normal);
            const int up = beta >= 0.0 ? 0 : 1;
            for (int a = 0; a < 2; ++a) {
                o[a][up].noalias() += (w * beta * sign[a]) * s[a].values * s[up].values.transpose();
            }
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    // -{eps grad u}[v] - {eps grad v}[u]
                    kk[a][b].noalias() -= (w * 0.5 * eps * sign[a]) * s[a].values * flux[b].transpose();
                    kk[a][b].noalias() -= (w * 0.5 * eps * sign[b]) * flux[a] * s[b].values.transpose();
                    jj[a][b].noalias() +=
                        (w * spec.sigma * eps / h_e * sign[a] * sign[b]) * s[a].values * s[b].values.transpose();
                }
            }
        }
        const std::size_t blocks[2] = {k1, k2};
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                scatter(o_t, blocks[a], blocks[b], n, o[a][b]);
                scatter(k_t, blocks[a], blocks[b], n, kk[a][b]);
                scatter(j_t, blocks[a], blocks[b], n, jj[a][b]);
            }
        }
    }

    const std::size_t dofs = space.total_dofs();
    return {to_sparse(d_t, dofs), to_sparse(o_t, dofs), to_sparse(k_t, dofs), to_sparse(j_t, dofs)};
}

SparseMatrix assemble_bilinear(const DGSpace& space, const ProblemSpec& spec) {
    const BilinearParts p = assemble_bilinear_parts(space, spec);
    SparseMatrix a = p.diffusion_reaction + p.convection;
    a += p.consistency;
    a += p.penalty;
    return a;
}

Eigen::VectorXd assemble_rhs(const DGSpace& space, const ProblemSpec& spec, const DGFunction& u_prev) {
    const Mesh& other = u_prev.space().mesh();
    const bool same_mesh = &other == &space.mesh() || (other.lineage() == space.mesh().lineage() &&
                                                        other.generation_counter() == space.mesh_stamp());
    if (!same_mesh || u_prev.space().degree() != space.degree()) {
        throw InvalidArgument("assemble_rhs: u_prev lives on a different space");
    }
    if (u_prev.coefficients().size() != static_cast<Eigen::Index>(space.total_dofs())) {
        throw InvalidArgument("assemble_rhs: u_prev has the wrong number of dofs");
    }
    const int n = space.dofs_per_element();
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(space.total_dofs()));
    for (std::size_t k = 0; k < space.num_elements(); ++k) {
        Eigen::VectorXd local = (space.geometry(k).det / spec.tau) * u_prev.block(k);
        if (spec.source) {
            for (std::size_t q = 0; q < space.element_rule().size(); ++q) {
                local += (space.quadrature_weight(k, q) * spec.source(space.quadrature_point(k, q))) *
                         space.basis_table().row(static_cast<Eigen::Index>(q)).transpose();
            }
        }
        rhs.segment(static_cast<Eigen::Index>(k) * n, n) = local;
    }
    if (spec.neumann_flux) {
        const Mesh& mesh = space.mesh();
        const auto& erule = space.edge_rule();
        for (const Edge& e : mesh.edges()) {
            if (e.kind != EdgeKind::boundary) continue;
            const std::size_t k = mesh.active_index(e.elements[0]);
            for (std::size_t q = 0; q < erule.size(); ++q) {
                const Point x = edge_point(mesh, e, erule.points[q]);
                const BasisSample s = space.sample(k, x);
                rhs.segment(static_cast<Eigen::Index>(k) * n, n) +=
                    (erule.weights[q] * e.length * spec.neumann_flux(x, e.normal)) * s.values;
            }
        }
    }
    return rhs;
}

AssembledSystem assemble_system(const DGSpace& space, const ProblemSpec& spec, const DGFunction& u_prev) {
    AssembledSystem sys;
    sys.parts = assemble_bilinear_parts(space, spec);
    sys.stiffness = sys.parts.diffusion_reaction + sys.parts.convection;
    sys.stiffness += sys.parts.consistency;
    sys.stiffness += sys.parts.penalty;
    sys.rhs = assemble_rhs(space, spec, u_prev);
    return sys;
}

void assemble_reaction(const DGSpace& space, const ProblemSpec& spec, const Eigen::VectorXd& u,
                       Eigen::VectorXd& values, SparseMatrix* jacobian) {
    const int n = space.dofs_per_element();
    values = Eigen::VectorXd::Zero(u.size());
    Triplets t;
    if (jacobian) t.reserve(space.num_elements() * n * n);
    if (spec.reaction) {
        const auto& table = space.basis_table();
        for (std::size_t k = 0; k < space.num_elements(); ++k) {
            const auto c = u.segment(static_cast<Eigen::Index>(k) * n, n);
            Eigen::VectorXd local = Eigen::VectorXd::Zero(n);
            Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
            for (std::size_t q = 0; q < space.element_rule().size(); ++q) {
                const Eigen::VectorXd phi = table.row(static_cast<Eigen::Index>(q)).transpose();
                const double uq = phi.dot(c);
                const double w = space.quadrature_weight(k, q) / spec.epsilon;
                local += (w * nonlinearity(uq)) * phi;
                if (jacobian) jac.noalias() += (w * nonlinearity_derivative(uq)) * phi * phi.transpose();
            }
            values.segment(static_cast<Eigen::Index>(k) * n, n) = local;
            if (jacobian) scatter(t, k, k, n, jac);
        }
    }
    if (jacobian) *jacobian = to_sparse(t, space.total_dofs());
}

ResidualJacobian residual_and_jacobian(const AssembledSystem& system, const DGSpace& space, const ProblemSpec& spec,
                                       const Eigen::VectorXd& u, bool with_jacobian) {
    ResidualJacobian out;
    Eigen::VectorXd reaction;
    SparseMatrix dreaction;
    assemble_reaction(space, spec, u, reaction, with_jacobian ? &dreaction : nullptr);
    out.residual = system.stiffness * u + reaction - system.rhs;
    if (with_jacobian) out.jacobian = system.stiffness + dreaction;
    return out;
}

ResidualJacobian assemble_residual_and_jacobian(const DGSpace& space, const ProblemSpec& spec, const DGFunction& u,
                                                const DGFunction& u_prev) {
    if (u.coefficients().size() != static_cast<Eigen::Index>(space.total_dofs())) {
        throw InvalidArgument("assemble_residual_and_jacobian: u has the wrong number of dofs");
    }
    const AssembledSystem system = assemble_system(space, spec, u_prev);
    return residual_and_jacobian(system, space, spec, u.coefficients());
}

double coercivity_probe(const SparseMatrix& stiffness, int samples, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> normal;
    double worst = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd v(stiffness.rows());
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
        worst = std::min(worst, v.dot(stiffness * v) / v.squaredNorm());
    }
    return worst;
}

void write_matrix_coo(const std::string& path, const SparseMatrix& matrix) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(fmt::format("cannot open {} for writing", path));
    const Eigen::SparseMatrix<double, Eigen::RowMajor> rows = matrix;
    for (int row = 0; row < rows.outerSize(); ++row) {
        for (decltype(rows)::InnerIterator it(rows, row); it; ++it) {
            out << fmt::format("{} {} {:.17g}\n", it.row(), it.col(), it.value());
        }
    }
    if (!out) throw std::runtime_error(fmt::format("failed writing {}", path));
}

} // namespace advac
