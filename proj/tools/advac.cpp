// advac: adaptive SIPG solver for the advective Allen-Cahn equation.
#include "advac/config.hpp"
#include "advac/errors.hpp"
#include "advac/experiment.hpp"
#include "advac/verify.hpp"

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

constexpr int exit_config = 2;
constexpr int exit_solver = 3;

void apply_thread_cap() {
#ifdef _OPENMP
    if (const char* env = std::getenv("ADVAC_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }
#endif
}

advac::ExperimentConfig resolve(const std::string& problem, const std::string& scale, const std::string& file,
                                const std::vector<std::string>& overrides) {
    if (scale != "desk" && scale != "full") throw advac::ConfigError("--scale must be desk or full");
    advac::ExperimentConfig c = advac::builtin(problem, scale == "desk" ? advac::Scale::desk : advac::Scale::full);
    if (!file.empty()) c = advac::load_config(file, c);
    for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw advac::ConfigError(fmt::format("--set expects key=value, got '{}'", kv));
        advac::set_key(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return c;
}

int cmd_run(const advac::ExperimentConfig& c, bool dump_config) {
    advac::validate(c);
    if (dump_config) {
        std::cout << advac::serialize(c);
        return 0;
    }
    const auto result = advac::run_experiment(c, true);
    const auto& recs = result.run.records;
    std::size_t max_dofs = 0;
    double max_eta = 0.0;
    int iters = 0;
    for (const auto& r : recs) {
        max_dofs = std::max(max_dofs, r.dofs);
        max_eta = std::max(max_eta, r.max_eta);
        iters += r.newton_iters;
    }
    fmt::print("{} {}: {} steps, final dofs {}, max dofs {}, max eta^2 {:.3e}, newton iterations {}\n", c.problem,
               c.mode, recs.size(), recs.empty() ? 0 : recs.back().dofs, max_dofs, max_eta, iters);
    for (const auto& f : result.files) fmt::print("  wrote {}\n", f.string());
    return 0;
}

int cmd_convergence(const advac::ExperimentConfig& c, int levels, int n0) {
    advac::validate(c);
    const auto table = advac::convergence_study(c, levels, n0);
    fmt::print("{:>5} {:>8} {:>11} {:>11} {:>11} {:>11} {:>8}\n", "n", "dofs", "h", "L2 error", "dG error", "eta",
               "eta/dG");
    std::vector<double> h, l2, dg;
    for (const auto& l : table) {
        fmt::print("{:>5} {:>8} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>8.3f}\n", l.n, l.dofs, l.h, l.l2, l.dg,
                   l.eta, l.eta / l.dg);
        h.push_back(l.h);
        l2.push_back(l.l2);
        dg.push_back(l.dg);
    }
    fmt::print("fitted L2 order {:.3f}, dG order {:.3f}\n", advac::fit_rate(h, l2), advac::fit_rate(h, dg));
    return 0;
}

int cmd_verify() {
    int failed = 0;
    for (const auto& r : advac::run_invariant_suite()) {
        fmt::print("[{}] {}{}\n", r.passed ? "PASS" : "FAIL", r.name, r.detail.empty() ? "" : " (" + r.detail + ")");
        failed += r.passed ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    apply_thread_cap();
    CLI::App app{"Adaptive SIPG solver for the advective Allen-Cahn equation"};
    app.require_subcommand(1);

    std::string problem = "expanding", mode, scale = "desk", out, config_file;
    std::vector<std::string> overrides;
    bool dump = false;
    auto* run = app.add_subcommand("run", "Run an experiment and write VTK/CSV output");
    run->add_option("--problem", problem, "expanding | sheer | manufactured-linear | manufactured-nonlinear");
    run->add_option("--mode", mode, "adaptive | uniform");
    run->add_option("--scale", scale, "desk | full");
    run->add_option("--out", out, "Output directory");
    run->add_option("--config", config_file, "key = value file applied on top of the preset");
    run->add_option("--set", overrides, "key=value override, repeatable");
    run->add_flag("--dump-config", dump, "Print the resolved config and exit");

    std::string conv_problem = "manufactured-linear";
    int levels = 4, n0 = 4;
    std::string conv_config;
    std::vector<std::string> conv_overrides;
    auto* conv = app.add_subcommand("convergence", "Uniform refinement study of a manufactured problem");
    conv->add_option("--problem", conv_problem, "manufactured-linear | manufactured-nonlinear");
    conv->add_option("--levels", levels, "Number of levels")->check(CLI::Range(2, 10));
    conv->add_option("--n0", n0, "Coarsest grid parameter")->check(CLI::PositiveNumber);
    conv->add_option("--config", conv_config, "key = value file applied on top of the preset");
    conv->add_option("--set", conv_overrides, "key=value override, repeatable");

    auto* verify = app.add_subcommand("verify", "Run the invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        if (run->parsed()) {
            advac::ExperimentConfig c = resolve(problem, scale, config_file, overrides);
            if (!mode.empty()) c.mode = mode;
            if (!out.empty()) c.output_dir = out;
            return cmd_run(c, dump);
        }
        if (conv->parsed()) return cmd_convergence(resolve(conv_problem, "desk", conv_config, conv_overrides), levels, n0);
        if (verify->parsed()) return cmd_verify();
    } catch (const advac::ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return exit_config;
    } catch (const advac::CoercivityError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return exit_config;
    } catch (const advac::StepFailure& e) {
        fmt::print(stderr, "solver failure: {}\n", e.what());
        return exit_solver;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}
