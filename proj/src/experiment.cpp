#include "advac/experiment.hpp"

#include "advac/errors.hpp"
#include "advac/estimator.hpp"
#include "advac/io.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace advac {

namespace {

class FanOut : public RunObserver {
public:
    FanOut(RunObserver* a, RunObserver* b) : a_(a), b_(b) {}
    void initial(const DGFunction& u0) override {
        for (auto* o : {a_, b_}) {
            if (o) o->initial(u0);
        }
    }
    void adapted(const AdaptEvent& e, std::span<const ElementIndicator> ind) override {
        for (auto* o : {a_, b_}) {
            if (o) o->adapted(e, ind);
        }
    }
    void step(const StepRecord& r, const DGFunction& u) override {
        for (auto* o : {a_, b_}) {
            if (o) o->step(r, u);
        }
    }

private:
    RunObserver* a_;
    RunObserver* b_;
};

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, bool write_files, RunObserver* observer,
                                const NewtonConfig& newton) {
    validate(config);
    const ProblemSpec spec = to_problem_spec(config);
    const bool adaptive = config.mode == "adaptive";
    const Mesh mesh = uniform_initial_mesh(adaptive ? config.initial_n : config.uniform_n);
    AdaptDriver driver;
    driver.adaptive = adaptive;
    driver.max_cycles = config.max_adapt_cycles;
    driver.prerefine = adaptive;

    std::unique_ptr<OutputWriter> writer;
    if (write_files) {
        writer = std::make_unique<OutputWriter>(config.output_dir, config.problem, config.mode,
                                                snapshot_steps(config.snapshot_times, config.tau));
    }
    FanOut fan(writer.get(), observer);
    ExperimentResult result{advac::run(spec, mesh, driver, &fan, newton), {}};
    if (writer) {
        writer->finish();
        result.files = writer->written();
    }
    return result;
}

std::vector<ConvergenceLevel> convergence_study(const ExperimentConfig& config, int levels, int n0) {
    if (config.source != "manufactured") throw ConfigError("convergence study needs a manufactured problem");
    if (levels < 2) throw ConfigError("convergence study needs at least two levels");
    const ProblemSpec spec = to_problem_spec(config);
    std::vector<ConvergenceLevel> out;
    for (int l = 0; l < levels; ++l) {
        ConvergenceLevel lvl;
        lvl.n = n0 << l;
        auto mesh = std::make_shared<const Mesh>(uniform_initial_mesh(lvl.n));
        const SpacePtr space = DGSpace::create(mesh, spec.degree);
        DGFunction u = project_l2(space, spec.initial_condition);
        for (int k = 0; k < spec.num_steps(); ++k) {
            NewtonReport report;
            DGFunction next = solve_step(space, spec, u, {}, &report);
            lvl.newton_iters += report.iterations;
            if (k + 1 == spec.num_steps()) lvl.eta = global_indicator(estimate(next, u, spec));
            u = std::move(next);
        }
        lvl.dofs = space->total_dofs();
        for (ElementId id : mesh->active()) lvl.h = std::max(lvl.h, mesh->diameter(id));
        const StabilityConstants constants = compute_constants(*space, spec);
        lvl.l2 = l2_error(u, manufactured_exact);
        lvl.dg = dg_error_computable(u, manufactured_exact, manufactured_exact_gradient, constants, spec);
        out.push_back(lvl);
    }
    return out;
}

double fit_rate(const std::vector<double>& h, const std::vector<double>& err) {
    const std::size_t n = h.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(h[i]), y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace advac
