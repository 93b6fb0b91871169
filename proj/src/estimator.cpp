#include "advac/estimator.hpp"

#include "advac/errors.hpp"
#include "advac/forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace advac {

namespace {

Point edge_point(const Mesh& mesh, const Edge& e, double s) {
    const Point a = mesh.vertices()[e.vertices[0]];
    const Point b = mesh.vertices()[e.vertices[1]];
    return a + s * (b - a);
}

double laplacian_at_quadrature(const DGFunction& u, std::size_t k, std::size_t q) {
    const DGSpace& space = u.space();
    const Eigen::RowVector3d h = u.block(k).transpose() * space.reference_hessians(q);
    Eigen::Matrix2d href;
    href << h[0], h[1], h[1], h[2];
    const Eigen::Matrix2d& inv = space.geometry(k).inverse;
    return (inv.transpose() * href * inv).trace();
}

struct EdgeJumps {
    double value_sq = 0.0; // ||[u]||^2_{L2(e)}
    double flux_sq = 0.0;  // ||[eps grad u]||^2_{L2(e)}
};

EdgeJumps edge_jumps(const DGFunction& u, const Edge& e, double epsilon) {
    const DGSpace& space = u.space();
    const Mesh& mesh = space.mesh();
    const auto& rule = space.edge_rule();
    const std::size_t k1 = mesh.active_index(e.elements[0]);
    const std::size_t k2 = mesh.active_index(e.elements[1]);
    EdgeJumps j;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point x = edge_point(mesh, e, rule.points[q]);
        const double w = rule.weights[q] * e.length;
        const double du = u.value_at(k1, x) - u.value_at(k2, x);
        const double dflux = epsilon * dot(u.gradient_at(k1, x) - u.gradient_at(k2, x), e.normal);
        j.value_sq += w * du * du;
        j.flux_sq += w * dflux * dflux;
    }
    return j;
}

double edge_contribution(const Edge& e, const EdgeJumps& j, double rho_e, const ProblemSpec& spec, double kappa0) {
    const double h = e.length;
    const double eps = spec.epsilon;
    return rho_e / std::sqrt(eps) * j.flux_sq + (eps * spec.sigma / h + kappa0 * h + h / eps) * j.value_sq;
}

struct ElementTerms {
    double residual_sq = 0.0;  // || strong residual ||^2
    double oscillation_sq = 0.0; // ||alpha - alpha_h||^2 + ||(V - V_h) . grad u||^2
};

ElementTerms element_terms(std::size_t k, const DGFunction& u, const DGFunction& u_prev, const ProblemSpec& spec,
                           const ProjectedData& data) {
    const DGSpace& space = u.space();
    ElementTerms t;
    for (std::size_t q = 0; q < space.element_rule().size(); ++q) {
        const Point x = space.quadrature_point(k, q);
        const double w = space.quadrature_weight(k, q);
        const double uq = u.value_at_quadrature(k, q);
        const Point grad = u.gradient_at_quadrature(k, q);
        const double alpha_h = data.alpha.value_at_quadrature(k, q);
        const Point v_h{data.vx.value_at_quadrature(k, q), data.vy.value_at_quadrature(k, q)};
        double load = u_prev.value_at_quadrature(k, q) / spec.tau;
        if (spec.source) load += spec.source(x);
        const double reaction = spec.reaction ? nonlinearity(uq) / spec.epsilon : 0.0;
        const double res =
            load - alpha_h * uq + spec.epsilon * laplacian_at_quadrature(u, k, q) - dot(v_h, grad) - reaction;
        t.residual_sq += w * res * res;

        const double alpha = 1.0 / spec.tau + spec.velocity.divergence(x);
        const double dv = dot(spec.velocity(x) - v_h, grad);
        t.oscillation_sq += w * ((alpha - alpha_h) * (alpha - alpha_h) + dv * dv);
    }
    return t;
}

void check_same_space(const DGFunction& u, const DGFunction& u_prev) {
    if (u.space().mesh_stamp() != u_prev.space().mesh_stamp() ||
        u.space().mesh().lineage() != u_prev.space().mesh().lineage() ||
        u.coefficients().size() != u_prev.coefficients().size()) {
        throw InvalidArgument("estimator: u and u_prev must live on the same space");
    }
}

} // namespace

double compute_kappa0(const ProblemSpec& spec, const Mesh& mesh) {
    const TriangleRule rule = triangle_rule(2 * spec.degree + 2);
    double min_div = std::numeric_limits<double>::infinity();
    for (ElementId id : mesh.active()) {
        const ElementGeometry g = element_geometry(mesh, id);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            min_div = std::min(min_div, spec.velocity.divergence(g.map(rule.xi(q), rule.eta(q))));
        }
    }
    return std::max(0.0, 1.0 / spec.tau + 0.5 * min_div);
}

double stability_weight(double h, double epsilon, double kappa0) {
    const double diffusive = h / std::sqrt(epsilon);
    return kappa0 > 0.0 ? std::min(diffusive, 1.0 / std::sqrt(kappa0)) : diffusive;
}

StabilityConstants compute_constants(const DGSpace& space, const ProblemSpec& spec) {
    StabilityConstants c;
    c.kappa0 = compute_kappa0(spec, space.mesh());
    c.rho_element.reserve(space.num_elements());
    for (std::size_t k = 0; k < space.num_elements(); ++k) {
        c.rho_element.push_back(stability_weight(space.geometry(k).diameter, spec.epsilon, c.kappa0));
    }
    c.rho_edge.reserve(space.mesh().edges().size());
    for (const Edge& e : space.mesh().edges()) c.rho_edge.push_back(stability_weight(e.length, spec.epsilon, c.kappa0));
    return c;
}

ProjectedData project_data(const SpacePtr& space, const ProblemSpec& spec) {
    const double inv_tau = 1.0 / spec.tau;
    const auto& vel = spec.velocity;
    return {project_l2(space, [&](Point x) { return inv_tau + vel.divergence(x); }),
            project_l2(space, [&](Point x) { return vel(x).x; }),
            project_l2(space, [&](Point x) { return vel(x).y; })};
}

double volume_residual(ElementId element, const DGFunction& u, const DGFunction& u_prev, const ProblemSpec& spec,
                       const StabilityConstants& constants, const ProjectedData& data) {
    check_same_space(u, u_prev);
    const std::size_t k = u.space().block_of(element);
    return constants.rho_element[k] * std::sqrt(element_terms(k, u, u_prev, spec, data).residual_sq);
}

double edge_residual(ElementId element, const DGFunction& u, const ProblemSpec& spec,
                     const StabilityConstants& constants) {
    const Mesh& mesh = u.space().mesh();
    double sum = 0.0;
    for (EdgeIndex ei : mesh.element_edges(element)) {
        const Edge& e = mesh.edges()[ei];
        if (e.kind != EdgeKind::interior) continue;
        sum += edge_contribution(e, edge_jumps(u, e, spec.epsilon), constants.rho_edge[ei], spec, constants.kappa0);
    }
    return std::sqrt(0.5 * sum);
}

double data_oscillation(ElementId element, const DGFunction& u, const ProblemSpec& spec,
                        const StabilityConstants& constants, const ProjectedData& data) {
    const std::size_t k = u.space().block_of(element);
    return constants.rho_element[k] * std::sqrt(element_terms(k, u, u, spec, data).oscillation_sq);
}

std::vector<ElementIndicator> estimate(const DGFunction& u, const DGFunction& u_prev, const ProblemSpec& spec) {
    check_same_space(u, u_prev);
    const DGSpace& space = u.space();
    const Mesh& mesh = space.mesh();
    const StabilityConstants constants = compute_constants(space, spec);
    const ProjectedData data = project_data(u.space_ptr(), spec);

    std::vector<double> edge_sum(space.num_elements(), 0.0);
    const auto& edges = mesh.edges();
    std::vector<double> contribution(edges.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(edges.size()); ++i) {
        const Edge& e = edges[i];
        if (e.kind != EdgeKind::interior) continue;
        contribution[i] = edge_contribution(e, edge_jumps(u, e, spec.epsilon), constants.rho_edge[i], spec,
                                            constants.kappa0);
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].kind != EdgeKind::interior) continue;
        edge_sum[mesh.active_index(edges[i].elements[0])] += contribution[i];
        edge_sum[mesh.active_index(edges[i].elements[1])] += contribution[i];
    }

    std::vector<ElementIndicator> out(space.num_elements());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t kk = 0; kk < static_cast<std::ptrdiff_t>(space.num_elements()); ++kk) {
        const auto k = static_cast<std::size_t>(kk);
        const ElementTerms t = element_terms(k, u, u_prev, spec, data);
        const double rho = constants.rho_element[k];
        ElementIndicator& ind = out[k];
        ind.element = space.element_id(k);
        ind.eta_R = rho * std::sqrt(t.residual_sq);
        ind.eta_0 = std::sqrt(0.5 * edge_sum[k]);
        ind.theta = rho * std::sqrt(t.oscillation_sq);
        ind.eta_sq = ind.eta_R * ind.eta_R + 0.5 * edge_sum[k];
    }
    return out;
}

double global_indicator(std::span<const ElementIndicator> indicators) {
    double sum = 0.0;
    for (const auto& i : indicators) sum += i.eta_sq;
    return std::sqrt(sum);
}

double global_oscillation(std::span<const ElementIndicator> indicators) {
    double sum = 0.0;
    for (const auto& i : indicators) sum += i.theta * i.theta;
    return std::sqrt(sum);
}

double max_eta_sq(std::span<const ElementIndicator> indicators) {
    double m = 0.0;
    for (const auto& i : indicators) m = std::max(m, i.eta_sq);
    return m;
}

namespace {

double jump_norms(const DGFunction& v, const StabilityConstants& constants, const ProblemSpec& spec) {
    double sum = 0.0;
    for (const Edge& e : v.space().mesh().edges()) {
        if (e.kind != EdgeKind::interior) continue;
        const double h = e.length;
        const double weight = spec.sigma * spec.epsilon / h + constants.kappa0 * h + h / spec.epsilon;
        sum += weight * edge_jumps(v, e, spec.epsilon).value_sq;
    }
    return sum;
}

} // namespace

double dg_norm_squared(const DGFunction& v, const StabilityConstants& constants, const ProblemSpec& spec) {
    const DGSpace& space = v.space();
    double sum = 0.0;
    for (std::size_t k = 0; k < space.num_elements(); ++k) {
        for (std::size_t q = 0; q < space.element_rule().size(); ++q) {
            const double w = space.quadrature_weight(k, q);
            const Point g = v.gradient_at_quadrature(k, q);
            const double val = v.value_at_quadrature(k, q);
            sum += w * (spec.epsilon * spec.epsilon * dot(g, g) + constants.kappa0 * val * val);
        }
    }
    return sum + jump_norms(v, constants, spec);
}

double dg_norm_computable(const DGFunction& v, const StabilityConstants& constants, const ProblemSpec& spec) {
    return std::sqrt(dg_norm_squared(v, constants, spec));
}

double dg_error_computable(const DGFunction& u_h, const ScalarField& exact,
                           const std::function<Point(Point)>& exact_gradient, const StabilityConstants& constants,
                           const ProblemSpec& spec) {
    const DGSpace& space = u_h.space();
    double sum = 0.0;
    for (std::size_t k = 0; k < space.num_elements(); ++k) {
        for (std::size_t q = 0; q < space.element_rule().size(); ++q) {
            const Point x = space.quadrature_point(k, q);
            const double w = space.quadrature_weight(k, q);
            const Point g = exact_gradient(x) - u_h.gradient_at_quadrature(k, q);
            const double e = exact(x) - u_h.value_at_quadrature(k, q);
            sum += w * (spec.epsilon * spec.epsilon * dot(g, g) + constants.kappa0 * e * e);
        }
    }
    return std::sqrt(sum + jump_norms(u_h, constants, spec));
}

double l2_error(const DGFunction& u_h, const ScalarField& exact) {
    const DGSpace& space = u_h.space();
    double sum = 0.0;
    for (std::size_t k = 0; k < space.num_elements(); ++k) {
        for (std::size_t q = 0; q < space.element_rule().size(); ++q) {
            const double e = exact(space.quadrature_point(k, q)) - u_h.value_at_quadrature(k, q);
            sum += space.quadrature_weight(k, q) * e * e;
        }
    }
    return std::sqrt(sum);
}

double c_star(const ProblemSpec& spec, double kappa0) {
    return kappa0 > 0.0 ? (1.0 / spec.tau) / kappa0 : std::numeric_limits<double>::infinity();
}

} // namespace advac
