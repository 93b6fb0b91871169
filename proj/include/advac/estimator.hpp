#pragma once

#include "advac/problem.hpp"
#include "advac/space.hpp"

#include <span>
#include <vector>

namespace advac {

struct ElementIndicator {
    ElementId element = no_element;
    double eta_R = 0.0; // volume residual
    double eta_0 = 0.0; // interior edge residual
    double theta = 0.0; // data approximation
    double eta_sq = 0.0; // eta_R^2 + eta_0^2
};

struct StabilityConstants {
    double kappa0 = 0.0;
    std::vector<double> rho_element; // by block index
    std::vector<double> rho_edge;    // by edge index
};

/// kappa0 = 1/tau + min div(V)/2 over all element quadrature points, clamped at 0.
double compute_kappa0(const ProblemSpec& spec, const Mesh& mesh);

/// rho = min(h eps^-1/2, kappa0^-1/2), or h eps^-1/2 when kappa0 = 0.
double stability_weight(double h, double epsilon, double kappa0);

StabilityConstants compute_constants(const DGSpace& space, const ProblemSpec& spec);

/// L2 projections alpha_h and V_h of alpha = 1/tau + div(V) and V onto the space.
struct ProjectedData {
    DGFunction alpha;
    DGFunction vx;
    DGFunction vy;
};
ProjectedData project_data(const SpacePtr& space, const ProblemSpec& spec);

/// rho_E || l(u_prev) - alpha_h u + eps Lap_h u - V_h . grad_h u - r(u) ||_{L2(E)}
double volume_residual(ElementId element, const DGFunction& u, const DGFunction& u_prev, const ProblemSpec& spec,
                       const StabilityConstants& constants, const ProjectedData& data);

/// sqrt of 1/2 sum over interior edges of E of
/// eps^-1/2 rho_e ||[eps grad u]||^2 + (eps sigma / h_e + kappa0 h_e + h_e / eps) ||[u]||^2
double edge_residual(ElementId element, const DGFunction& u, const ProblemSpec& spec,
                     const StabilityConstants& constants);

/// rho_E (||alpha - alpha_h||^2 + ||(V - V_h) . grad u||^2)^1/2
double data_oscillation(ElementId element, const DGFunction& u, const ProblemSpec& spec,
                        const StabilityConstants& constants, const ProjectedData& data);

/// Indicator table over all active elements, in block order.
std::vector<ElementIndicator> estimate(const DGFunction& u, const DGFunction& u_prev, const ProblemSpec& spec);

/// (sum eta_E^2)^1/2
double global_indicator(std::span<const ElementIndicator> indicators);
double global_oscillation(std::span<const ElementIndicator> indicators);
double max_eta_sq(std::span<const ElementIndicator> indicators);

/// Computable part of the dG norm squared: sum_E (||eps grad v||^2 + kappa0 ||v||^2)
/// + sum_e (sigma eps / h_e + kappa0 h_e + h_e / eps) ||[v]||^2. The supremum
/// seminorm |V v|_* is not included.
double dg_norm_squared(const DGFunction& v, const StabilityConstants& constants, const ProblemSpec& spec);
double dg_norm_computable(const DGFunction& v, const StabilityConstants& constants, const ProblemSpec& spec);

/// Computable dG norm of u_exact - u_h (u_exact is continuous, so jumps are those of u_h).
double dg_error_computable(const DGFunction& u_h, const ScalarField& exact,
                           const std::function<Point(Point)>& exact_gradient, const StabilityConstants& constants,
                           const ProblemSpec& spec);

double l2_error(const DGFunction& u_h, const ScalarField& exact);

/// ||1/tau||_inf / kappa0, reported as a diagnostic.
double c_star(const ProblemSpec& spec, double kappa0);

} // namespace advac
