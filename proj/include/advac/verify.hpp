#pragma once

#include "advac/mesh.hpp"
#include "advac/problem.hpp"
#include "advac/space.hpp"

#include <string>
#include <vector>

namespace advac {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct MeshWalkReport {
    int operations = 0;
    int failures = 0;
    double worst_area_error = 0.0;
    double min_angle = 0.0;
    double initial_min_angle = 0.0;
    std::size_t max_active = 0;
    std::string first_failure;
};

/// Random refine/coarsen sequence from uniform_initial_mesh(initial_n),
/// checking conformity, area and angles after every operation.
MeshWalkReport random_mesh_walk(unsigned seed, int operations, int initial_n = 1);

/// max |J_fd - J| / max |J| for the residual of one step at state u.
double jacobian_fd_error(const SpacePtr& space, const ProblemSpec& spec, const DGFunction& u,
                         const DGFunction& u_prev, double h = 1e-7);

/// Quick invariant suite over all modules (used by `advac verify`).
std::vector<CheckResult> run_invariant_suite();

} // namespace advac
