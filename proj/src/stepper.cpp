#include "advac/stepper.hpp"

#include "advac/errors.hpp"

#include <Eigen/SparseLU>
#include <fmt/core.h>

namespace advac {

DGFunction solve_step(const SpacePtr& space, const ProblemSpec& spec, const DGFunction& u_prev,
                      const NewtonConfig& config, NewtonReport* report) {
    const AssembledSystem system = assemble_system(*space, spec, u_prev);
    Eigen::VectorXd u = u_prev.coefficients();
    ResidualJacobian rj = residual_and_jacobian(system, *space, spec, u);
    double r = rj.residual.norm();
    const double r0 = r;
    std::vector<double> history{r};

    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    bool analysed = false;
    int iters = 0;
    auto converged = [&] { return r <= config.abs_tol || r <= config.rel_tol * r0; };
    while (!converged()) {
        if (iters >= config.max_iters) {
            throw StepFailure(fmt::format("Newton did not converge in {} iterations (residual {:.3e})", iters, r),
                              history);
        }
        rj.jacobian.makeCompressed();
        if (!analysed) {
            lu.analyzePattern(rj.jacobian);
            analysed = true;
        }
        lu.factorize(rj.jacobian);
        if (lu.info() != Eigen::Success) throw StepFailure("Jacobian factorization failed", history);
        const Eigen::VectorXd delta = lu.solve(-rj.residual);

        double step = 1.0;
        Eigen::VectorXd trial = u + delta;
        double r_trial = residual_and_jacobian(system, *space, spec, trial, false).residual.norm();
        for (int h = 0; h < config.max_halvings && !(r_trial < r); ++h) {
            step *= config.damping;
            trial = u + step * delta;
            r_trial = residual_and_jacobian(system, *space, spec, trial, false).residual.norm();
        }
        u = std::move(trial);
        rj = residual_and_jacobian(system, *space, spec, u);
        r = rj.residual.norm();
        history.push_back(r);
        ++iters;
    }
    if (report) {
        report->iterations = iters;
        report->initial_residual = r0;
        report->final_residual = r;
        report->history = std::move(history);
    }
    return DGFunction(space, std::move(u));
}

RunResult run(const ProblemSpec& spec, const Mesh& initial_mesh, const AdaptDriver& driver, RunObserver* observer,
              const NewtonConfig& newton) {
    spec.validate();
    const int steps = spec.num_steps();

    auto mesh0 = std::make_shared<const Mesh>(driver.adaptive && driver.prerefine
                                                  ? prerefine_initial(spec, initial_mesh)
                                                  : initial_mesh);
    SpacePtr space = DGSpace::create(mesh0, spec.degree);
    {
        const SparseMatrix a = assemble_bilinear(*space, spec);
        const double worst = coercivity_probe(a, 5, 1234u);
        if (!(worst > 0.0)) {
            throw CoercivityError(fmt::format("a_h(v, v) <= 0 for a random probe ({:.3e}); penalty {} too small",
                                              worst, spec.sigma),
                                  0.0);
        }
    }
    DGFunction u = project_l2(space, spec.initial_condition, {spec.initial_projection_depth});
    if (observer) observer->initial(u);
    RunResult result{{}, u, u};

    for (int k = 1; k <= steps; ++k) {
        NewtonReport report;
        DGFunction u_new = solve_step(space, spec, u, newton, &report);
        int iters = report.iterations;
        int cycles = 0;
        std::vector<ElementIndicator> indicators = estimate(u_new, u, spec);

        if (driver.adaptive) {
            for (int c = 0; c < driver.max_cycles; ++c) {
                AdaptOutcome outcome = adapt_once(space, indicators, u, spec);
                if (outcome.marks.empty()) break;
                ++cycles;
                if (observer) {
                    observer->adapted({k, outcome.marks.refine.size(), outcome.marks.coarsen.size(),
                                       outcome.elements_before, outcome.elements_after},
                                      indicators);
                }
                // unchanged mesh: the re-solve would reproduce u_new
                if (!outcome.changed) break;
                space = outcome.space;
                u = std::move(outcome.u_prev);
                u_new = solve_step(space, spec, u, newton, &report);
                iters += report.iterations;
                indicators = estimate(u_new, u, spec);
            }
        }

        StepRecord rec;
        rec.k = k;
        rec.t = k * spec.tau;
        rec.dofs = space->total_dofs();
        rec.newton_iters = iters;
        rec.residual = report.final_residual;
        rec.max_eta = max_eta_sq(indicators);
        rec.adapt_cycles = cycles;
        result.records.push_back(rec);
        if (observer) observer->step(rec, u_new);
        u = std::move(u_new);
    }
    result.final = u;
    return result;
}

} // namespace advac
