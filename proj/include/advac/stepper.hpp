#pragma once

#include "advac/adapt.hpp"
#include "advac/estimator.hpp"
#include "advac/forms.hpp"
#include "advac/space.hpp"

#include <memory>
#include <span>
#include <vector>

namespace advac {

struct NewtonConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_iters = 25;
    double damping = 0.5;
    int max_halvings = 10;
};

struct NewtonReport {
    int iterations = 0;
    double initial_residual = 0.0;
    double final_residual = 0.0;
    std::vector<double> history; // residual 2-norm of every iterate
};

/// One backward Euler step: damped Newton on a_h(u, v) + r_h(u) = l(v),
/// starting from u_prev. Throws StepFailure when max_iters is exhausted.
DGFunction solve_step(const SpacePtr& space, const ProblemSpec& spec, const DGFunction& u_prev,
                      const NewtonConfig& config = {}, NewtonReport* report = nullptr);

struct StepRecord {
    int k = 0;
    double t = 0.0;
    std::size_t dofs = 0;
    int newton_iters = 0;
    double residual = 0.0;
    double max_eta = 0.0; // max eta_E^2 on the final mesh of the step
    int adapt_cycles = 0;
};

struct AdaptEvent {
    int k = 0;
    std::size_t refine_marked = 0;
    std::size_t coarsen_marked = 0;
    std::size_t elements_before = 0;
    std::size_t elements_after = 0;
};

/// How the time loop treats the mesh.
struct AdaptDriver {
    bool adaptive = true;
    /// Adapt-and-resolve passes per step; 1 matches the single branch of the
    /// adaptive algorithm.
    int max_cycles = 1;
    /// Pre-refine the initial mesh against the initial condition.
    bool prerefine = true;
};

/// Receives the run as it happens; default implementations do nothing.
class RunObserver {
public:
    virtual ~RunObserver() = default;
    virtual void initial(const DGFunction& /*u0*/) {}
    /// Indicators computed on the pre-adaptation mesh when marking triggered.
    virtual void adapted(const AdaptEvent& /*event*/, std::span<const ElementIndicator> /*indicators*/) {}
    virtual void step(const StepRecord& /*record*/, const DGFunction& /*u*/) {}
};

struct RunResult {
    std::vector<StepRecord> records;
    DGFunction initial;
    DGFunction final;
};

/// Time loop: solve on the old mesh, estimate, keep or adapt the mesh,
/// transfer u_prev and re-solve.
RunResult run(const ProblemSpec& spec, const Mesh& initial_mesh, const AdaptDriver& driver,
              RunObserver* observer = nullptr, const NewtonConfig& newton = {});

} // namespace advac
