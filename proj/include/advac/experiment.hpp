#pragma once

#include "advac/config.hpp"
#include "advac/stepper.hpp"

#include <filesystem>
#include <vector>

namespace advac {

struct ExperimentResult {
    RunResult run;
    std::vector<std::filesystem::path> files; // empty unless outputs were written
};

/// Runs a configuration in its mode: adaptive runs start from
/// uniform_initial_mesh(initial_n), uniform runs from uniform_n.
/// `observer` sees the run alongside the file writer.
ExperimentResult run_experiment(const ExperimentConfig& config, bool write_files, RunObserver* observer = nullptr,
                                const NewtonConfig& newton = {});

struct ConvergenceLevel {
    int n = 0;
    std::size_t dofs = 0;
    double h = 0.0;       // largest element diameter
    double l2 = 0.0;      // ||u - u_h||
    double dg = 0.0;      // computable dG norm of the error
    double eta = 0.0;     // (sum eta_E^2)^1/2
    int newton_iters = 0;
};

/// Uniform levels n0, 2 n0, ... of a manufactured problem.
std::vector<ConvergenceLevel> convergence_study(const ExperimentConfig& config, int levels, int n0 = 4);

/// Least-squares slope of log(err) against log(h).
double fit_rate(const std::vector<double>& h, const std::vector<double>& err);

} // namespace advac
