#include "advac/verify.hpp"

#include "advac/config.hpp"
#include "advac/estimator.hpp"
#include "advac/forms.hpp"
#include "advac/quadrature.hpp"
#include "advac/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/core.h>

namespace advac {

MeshWalkReport random_mesh_walk(unsigned seed, int operations, int initial_n) {
    std::mt19937 rng(seed);
    Mesh mesh = uniform_initial_mesh(initial_n);
    MeshWalkReport report;
    report.initial_min_angle = min_active_angle(mesh);
    report.min_angle = report.initial_min_angle;
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    for (int op = 0; op < operations; ++op) {
        const auto active = mesh.active();
        const bool grow = mesh.num_active() < 600 && (mesh.num_active() < 24 || coin(rng) < 0.55);
        std::vector<ElementId> marked;
        if (grow) {
            std::uniform_int_distribution<std::size_t> pick(0, active.size() - 1);
            const int count = 1 + static_cast<int>(rng() % 4);
            for (int i = 0; i < count; ++i) marked.push_back(active[pick(rng)]);
            std::sort(marked.begin(), marked.end());
            marked.erase(std::unique(marked.begin(), marked.end()), marked.end());
            mesh = refine(mesh, marked);
        } else {
            for (ElementId id : active) {
                if (mesh.elements()[id].generation > 0 && coin(rng) < 0.6) marked.push_back(id);
            }
            mesh = coarsen(mesh, marked);
        }
        ++report.operations;
        report.max_active = std::max(report.max_active, mesh.num_active());
        const double area_error = std::abs(total_active_area(mesh) - 4.0);
        const double angle = min_active_angle(mesh);
        report.worst_area_error = std::max(report.worst_area_error, area_error);
        report.min_angle = std::min(report.min_angle, angle);
        std::string problem = check_mesh(mesh);
        if (problem.empty() && area_error > 1e-12) problem = fmt::format("area off by {:.3e}", area_error);
        if (problem.empty() && angle < 0.5 * report.initial_min_angle) problem = "minimum angle collapsed";
        if (!problem.empty()) {
            if (report.failures++ == 0) report.first_failure = fmt::format("op {}: {}", op, problem);
        }
    }
    return report;
}

double jacobian_fd_error(const SpacePtr& space, const ProblemSpec& spec, const DGFunction& u,
                         const DGFunction& u_prev, double h) {
    const ResidualJacobian base = assemble_residual_and_jacobian(*space, spec, u, u_prev);
    const Eigen::MatrixXd exact(base.jacobian);
    Eigen::MatrixXd fd(exact.rows(), exact.cols());
    for (Eigen::Index j = 0; j < exact.cols(); ++j) {
        DGFunction plus = u, minus = u;
        plus.coefficients()[j] += h;
        minus.coefficients()[j] -= h;
        fd.col(j) = (assemble_residual_and_jacobian(*space, spec, plus, u_prev).residual -
                     assemble_residual_and_jacobian(*space, spec, minus, u_prev).residual) /
                    (2.0 * h);
    }
    return (fd - exact).cwiseAbs().maxCoeff() / exact.cwiseAbs().maxCoeff();
}

namespace {

CheckResult check(std::string name, bool ok, std::string detail) { return {std::move(name), ok, std::move(detail)}; }

Eigen::VectorXd random_vector(Eigen::Index n, unsigned seed, double lo, double hi) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(lo, hi);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = d(rng);
    return v;
}

} // namespace

std::vector<CheckResult> run_invariant_suite() {
    std::vector<CheckResult> out;

    {
        const MeshWalkReport r = random_mesh_walk(0, 300);
        out.push_back(check("mesh conformity under refine/coarsen", r.failures == 0,
                            r.failures ? r.first_failure
                                       : fmt::format("{} ops, area error {:.1e}", r.operations, r.worst_area_error)));
    }
    {
        double worst = 0.0;
        for (int q = 0; q <= 4; ++q) {
            const ReferenceBasis basis(q);
            const TriangleRule rule = triangle_rule(2 * q);
            Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(basis.size(), basis.size());
            for (std::size_t i = 0; i < rule.size(); ++i) {
                const Eigen::VectorXd v = basis.values(rule.xi(i), rule.eta(i));
                gram += rule.weights[i] * v * v.transpose();
            }
            worst = std::max(worst, (gram - Eigen::MatrixXd::Identity(basis.size(), basis.size())).norm());
        }
        out.push_back(check("basis orthonormal on reference element", worst < 1e-12, fmt::format("{:.1e}", worst)));
    }
    {
        double worst = 0.0;
        for (int deg = 0; deg <= 10; ++deg) {
            const TriangleRule rule = triangle_rule(deg);
            for (int a = 0; a <= deg; ++a) {
                const int b = deg - a;
                double s = 0.0;
                for (std::size_t i = 0; i < rule.size(); ++i) {
                    s += rule.weights[i] * std::pow(rule.xi(i), a) * std::pow(rule.eta(i), b);
                }
                worst = std::max(worst, std::abs(s - reference_monomial_integral(a, b)));
            }
        }
        out.push_back(check("triangle quadrature exactness", worst < 1e-14, fmt::format("{:.1e}", worst)));
    }
    {
        ProblemSpec spec;
        spec.velocity = expanding_velocity(10.0);
        auto mesh = std::make_shared<const Mesh>(uniform_initial_mesh(1));
        const SpacePtr space = DGSpace::create(mesh, 1);
        const auto n = static_cast<Eigen::Index>(space->total_dofs());
        const DGFunction u(space, random_vector(n, 7, -0.5, 1.5));
        const DGFunction u_prev(space, random_vector(n, 8, 0.0, 1.0));
        const double err = jacobian_fd_error(space, spec, u, u_prev);
        out.push_back(check("Jacobian matches finite differences", err < 1e-6, fmt::format("{:.1e}", err)));
    }
    {
        ProblemSpec spec;
        spec.velocity = expanding_velocity(10.0);
        auto mesh = std::make_shared<const Mesh>(uniform_initial_mesh(2));
        const SpacePtr space = DGSpace::create(mesh, 1);
        const DGFunction zero(space);
        const DGFunction u = solve_step(space, spec, zero);
        const double dev = u.coefficients().cwiseAbs().maxCoeff();
        out.push_back(check("u = 0 is a fixed point", dev < 1e-10, fmt::format("{:.1e}", dev)));
    }
    {
        bool ok = true;
        for (const char* p : {"expanding", "sheer", "manufactured-linear", "manufactured-nonlinear"}) {
            const std::string s = serialize(builtin(p));
            ok = ok && serialize(parse_config(s)) == s;
        }
        out.push_back(check("config round trip", ok, ""));
    }
    {
        auto coarse = std::make_shared<const Mesh>(uniform_initial_mesh(2));
        std::vector<ElementId> all(coarse->active().begin(), coarse->active().end());
        auto fine = std::make_shared<const Mesh>(refine(*coarse, all));
        std::vector<ElementId> back(fine->active().begin(), fine->active().end());
        auto merged = std::make_shared<const Mesh>(coarsen(*fine, back));
        const SpacePtr s0 = DGSpace::create(coarse, 1);
        const DGFunction u(s0, random_vector(static_cast<Eigen::Index>(s0->total_dofs()), 3, -1.0, 1.0));
        const DGFunction w = transfer(transfer(u, DGSpace::create(fine, 1)), DGSpace::create(merged, 1));
        const double dev = (w.coefficients() - u.coefficients()).cwiseAbs().maxCoeff();
        out.push_back(check("coarsen after refine restores the data", dev < 1e-12, fmt::format("{:.1e}", dev)));
    }
    {
        double worst = 0.0;
        for (const char* p : {"expanding", "sheer"}) {
            const ProblemSpec spec = to_problem_spec(builtin(p));
            auto mesh = std::make_shared<const Mesh>(uniform_initial_mesh(2));
            const SpacePtr space = DGSpace::create(mesh, 1);
            const DGFunction u = project_l2(space, spec.initial_condition, {spec.initial_projection_depth});
            for (const ElementIndicator& ind : estimate(u, u, spec)) worst = std::max(worst, ind.theta);
        }
        out.push_back(check("data oscillation vanishes for affine flows", worst < 1e-13, fmt::format("{:.1e}", worst)));
    }
    return out;
}

} // namespace advac
