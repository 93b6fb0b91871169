// One line per acceptance criterion; exit status is nonzero if any fails.
#include "advac/config.hpp"
#include "advac/estimator.hpp"
#include "advac/experiment.hpp"
#include "advac/forms.hpp"
#include "advac/stepper.hpp"
#include "advac/verify.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

using namespace advac;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, double seconds, const std::string& detail) {
    if (!ok) ++failures;
    fmt::print("criterion {}: {}  ({:.2f} s)  {}\n", id, ok ? "PASS" : "FAIL", seconds, detail);
    std::fflush(stdout);
}

template <class F>
void timed(int id, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    double limit = 0.0;
    try {
        ok = body(detail, limit);
    } catch (const std::exception& e) {
        detail = fmt::format("exception: {}", e.what());
        ok = false;
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit > 0 && dt >= limit) {
        ok = false;
        detail += fmt::format("; over the {:.0f} s budget", limit);
    }
    report(id, ok, dt, detail);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::pair<double, double> value_range(const DGFunction& u) {
    const DGSpace& s = u.space();
    double lo = 1e300, hi = -1e300;
    for (std::size_t k = 0; k < s.num_elements(); ++k) {
        for (std::size_t q = 0; q < s.element_rule().size(); ++q) {
            const double v = u.value_at_quadrature(k, q);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const ElementId id = s.element_id(k);
        for (auto [a, b] : {std::pair{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}) {
            const double v = evaluate(u, id, a, b);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    return {lo, hi};
}

Point centroid(const Mesh& m, ElementId id) {
    const auto c = m.corners(id);
    return (1.0 / 3.0) * (c[0] + c[1] + c[2]);
}

// y-extent of the generation >= g region
double deep_y_extent(const Mesh& m, int g = 3) {
    double lo = 1e300, hi = -1e300;
    for (ElementId id : m.active()) {
        if (m.elements()[id].generation < g) continue;
        for (const Point& c : m.corners(id)) {
            lo = std::min(lo, c.y);
            hi = std::max(hi, c.y);
        }
    }
    return hi >= lo ? hi - lo : 0.0;
}

class RangeTracker : public RunObserver {
public:
    void initial(const DGFunction& u0) override {
        initial_extent = deep_y_extent(u0.space().mesh());
        for (int g : {5, 7}) initial_deeper.push_back(deep_y_extent(u0.space().mesh(), g));
        initial_active = u0.space().mesh().num_active();
    }
    void step(const StepRecord& r, const DGFunction& u) override {
        const auto [a, b] = value_range(u);
        lo = std::min(lo, a);
        hi = std::max(hi, b);
        records.push_back(r);
    }
    double lo = 1e300, hi = -1e300;
    double initial_extent = 0.0;
    std::vector<double> initial_deeper;
    std::size_t initial_active = 0;
    std::vector<StepRecord> records;
};

struct DeskChecks {
    bool dofs_ok = true, eta_ok = true, range_ok = true;
    std::size_t max_dofs = 0;
    double max_eta = 0.0;
    int first_dofs_violation = -1, first_eta_violation = -1;
};

DeskChecks check_desk(const RangeTracker& t, std::size_t baseline, double eta_cap) {
    DeskChecks c;
    for (const StepRecord& r : t.records) {
        c.max_dofs = std::max(c.max_dofs, r.dofs);
        c.max_eta = std::max(c.max_eta, r.max_eta);
        if (r.dofs >= baseline && c.dofs_ok) {
            c.dofs_ok = false;
            c.first_dofs_violation = r.k;
        }
        if (r.max_eta > eta_cap && c.eta_ok) {
            c.eta_ok = false;
            c.first_eta_violation = r.k;
        }
    }
    c.range_ok = t.lo >= -0.15 && t.hi <= 1.15;
    return c;
}

std::size_t uniform_dofs(int n) { return 3 * uniform_initial_mesh(n).num_active(); }

double constant_deviation(const DGFunction& u, double c) {
    const auto [lo, hi] = value_range(u);
    return std::max(std::abs(lo - c), std::abs(hi - c));
}

} // namespace

int main() {
    fmt::print("acceptance run, desk scale\n");

    const ExperimentConfig manufactured = builtin_manufactured("linear");
    std::vector<ConvergenceLevel> levels;

    timed(1, [&](std::string& d, double& limit) {
        limit = 60;
        levels = convergence_study(manufactured, 4, 4);
        std::vector<double> h, l2, dg;
        for (const auto& l : levels) {
            h.push_back(l.h);
            l2.push_back(l.l2);
            dg.push_back(l.dg);
        }
        const double r2 = fit_rate(h, l2), rdg = fit_rate(h, dg);
        d = fmt::format("L2 order {:.3f} in [1.8, 2.2], dG order {:.3f} in [0.8, 1.2]", r2, rdg);
        return r2 >= 1.8 && r2 <= 2.2 && rdg >= 0.8 && rdg <= 1.2;
    });

    timed(2, [&](std::string& d, double& limit) {
        limit = 1;
        const ProblemSpec spec = to_problem_spec(builtin("expanding"));
        const SpacePtr s = DGSpace::create(std::make_shared<const Mesh>(uniform_initial_mesh(1)), 1);
        std::mt19937 rng(42);
        std::uniform_real_distribution<double> dist(-0.5, 1.5);
        DGFunction u(s), prev(s);
        for (Eigen::Index i = 0; i < u.coefficients().size(); ++i) {
            u.coefficients()[i] = dist(rng);
            prev.coefficients()[i] = dist(rng);
        }
        const double err = jacobian_fd_error(s, spec, u, prev);
        d = fmt::format("{} triangles, relative FD error {:.3e} < 1e-6", s->num_elements(), err);
        return s->num_elements() == 8 && err < 1e-6;
    });

    timed(3, [&](std::string& d, double&) {
        ProblemSpec spec;
        spec.tau = 1.0;
        spec.epsilon = 1.0;
        spec.reaction = false;
        spec.final_time = 1.0;
        const ScalarField exact = [](Point p) { return 0.5 + 0.3 * p.x - 0.2 * p.y; };
        const Point grad{0.3, -0.2};
        spec.source = [=](Point p) { return exact(p) / spec.tau; };
        spec.initial_condition = constant_field(0.0);
        spec.neumann_flux = [=](Point, Point n) { return spec.epsilon * dot(grad, n); };
        const SpacePtr s = DGSpace::create(
            std::make_shared<const Mesh>(refine(uniform_initial_mesh(2), std::vector<ElementId>{3, 8})), 1);
        const DGFunction prev(s);
        const DGFunction u = solve_step(s, spec, prev, {1e-14, 1e-14, 5, 0.5, 10});
        double eta = 0.0;
        for (const auto& i : estimate(u, prev, spec)) eta = std::max({eta, i.eta_R, i.eta_0});
        double theta = 0.0;
        for (const char* p : {"expanding", "sheer"}) {
            const ProblemSpec ps = to_problem_spec(builtin(p));
            const SpacePtr s4 = DGSpace::create(std::make_shared<const Mesh>(uniform_initial_mesh(4)), 1);
            const DGFunction g = project_l2(s4, ps.initial_condition, {ps.initial_projection_depth});
            for (const auto& i : estimate(g, g, ps)) theta = std::max(theta, i.theta);
        }
        d = fmt::format("max eta_E {:.2e} <= 1e-12, max Theta_E {:.2e} < 1e-13", eta, theta);
        return eta <= 1e-12 && theta < 1e-13;
    });

    timed(4, [&](std::string& d, double& limit) {
        limit = 60;
        if (levels.empty()) levels = convergence_study(manufactured, 4, 4);
        double lo = 1e300, hi = 0.0;
        std::string eff;
        for (const auto& l : levels) {
            const double e = l.eta / l.dg;
            lo = std::min(lo, e);
            hi = std::max(hi, e);
            eff += fmt::format(" {:.3f}", e);
        }
        d = fmt::format("effectivity eta/||e||_dG:{}; spread {:.3f} <= 30", eff, hi / lo);
        return hi / lo <= 30.0;
    });

    timed(5, [&](std::string& d, double& limit) {
        limit = 30;
        int fails = 0, ops = 0;
        double area = 0.0, ratio = 1e300;
        std::string first;
        for (unsigned seed = 0; seed < 10; ++seed) {
            const MeshWalkReport r = random_mesh_walk(seed, 1000);
            fails += r.failures;
            ops += r.operations;
            area = std::max(area, r.worst_area_error);
            ratio = std::min(ratio, r.min_angle / r.initial_min_angle);
            if (first.empty()) first = r.first_failure;
        }
        d = fmt::format("{} operations, {} failures, worst area error {:.1e}, min angle ratio {:.3f}{}", ops, fails,
                        area, ratio, first.empty() ? "" : "; " + first);
        return ops == 10000 && fails == 0 && area <= 1e-12 && ratio >= 0.5;
    });

    const ExperimentConfig expanding = builtin_expanding(Scale::desk);
    const fs::path out_a = fs::current_path() / "acceptance_expanding_a";
    const fs::path out_b = fs::current_path() / "acceptance_expanding_b";
    const double eta_cap = 10 * expanding.stol_r;

    timed(6, [&](std::string& d, double& limit) {
        limit = 300;
        fs::remove_all(out_a);
        ExperimentConfig c = expanding;
        c.output_dir = out_a.string();
        RangeTracker t;
        const ExperimentResult r = run_experiment(c, true, &t);
        const Mesh& m = r.run.final.space().mesh();
        const double radius = std::sqrt(expanding.initial_param) * std::exp(expanding.v0 * expanding.final_time);
        int deep = 0, near = 0;
        for (ElementId id : m.active()) {
            if (m.elements()[id].generation < 3) continue;
            ++deep;
            const Point g = centroid(m, id);
            near += std::abs(std::sqrt(dot(g, g)) - radius) <= 0.2;
        }
        const double frac = deep ? static_cast<double>(near) / deep : 0.0;
        const std::size_t baseline = uniform_dofs(builtin_expanding(Scale::full).uniform_n);
        const DeskChecks k = check_desk(t, baseline, eta_cap);
        const bool a = deep > 0 && frac >= 0.8;
        d = fmt::format("(a) {}/{} generation>=3 elements within 0.2 of r={:.4f} ({:.1f}%) {}; "
                        "(b) max DoFs {} < {} {}; (c) max eta_E^2 {:.4g} <= {:.3g} {}; "
                        "(d) range [{:.4f}, {:.4f}] {}",
                        near, deep, radius, 100 * frac, a ? "ok" : "FAIL", k.max_dofs, baseline,
                        k.dofs_ok ? "ok" : "FAIL", k.max_eta, eta_cap, k.eta_ok ? "ok" : "FAIL", t.lo, t.hi,
                        k.range_ok ? "ok" : "FAIL");
        const std::size_t desk_baseline = uniform_dofs(expanding.uniform_n);
        fmt::print("  info: desk uniform mesh n={} has {} DoFs; adaptive peak {}\n", expanding.uniform_n,
                   desk_baseline, k.max_dofs);
        return a && k.dofs_ok && k.eta_ok && k.range_ok;
    });

    timed(7, [&](std::string& d, double& limit) {
        limit = 300;
        ExperimentConfig c = builtin_sheer(Scale::desk);
        RangeTracker t;
        const ExperimentResult r = run_experiment(c, false, &t);
        const double y0 = t.initial_extent;
        const double y1 = deep_y_extent(r.run.final.space().mesh());
        const std::size_t baseline = uniform_dofs(builtin_sheer(Scale::full).uniform_n);
        const DeskChecks k = check_desk(t, baseline, 10 * c.stol_r);
        const bool contracts = y0 > 0 && y1 < y0;
        for (int i = 0; i < 2; ++i) {
            const int g = 5 + 2 * i;
            fmt::print("  info: y-extent of generation>={} region {:.4f} -> {:.4f}\n", g, t.initial_deeper[i],
                       deep_y_extent(r.run.final.space().mesh(), g));
        }
        d = fmt::format("(b) max DoFs {} < {} {}; (c) max eta_E^2 {:.4g} <= {:.3g} {}; (d) range [{:.4f}, {:.4f}] {}; "
                        "y-extent of generation>=3 region {:.4f} -> {:.4f} {}",
                        k.max_dofs, baseline, k.dofs_ok ? "ok" : "FAIL", k.max_eta, 10 * c.stol_r,
                        k.eta_ok ? "ok" : "FAIL", t.lo, t.hi, k.range_ok ? "ok" : "FAIL", y0, y1,
                        contracts ? "ok" : "FAIL");
        return k.dofs_ok && k.eta_ok && k.range_ok && contracts;
    });

    timed(8, [&](std::string& d, double& limit) {
        limit = 5;
        const SpacePtr s = DGSpace::create(std::make_shared<const Mesh>(uniform_initial_mesh(4)), 1);
        bool ok = true;
        d.clear();
        for (const char* p : {"expanding", "sheer"}) {
            const ProblemSpec spec = to_problem_spec(builtin(p));
            for (double c : {0.0, 1.0}) {
                const DGFunction u = solve_step(s, spec, project_l2(s, constant_field(c)));
                const double dev = constant_deviation(u, c);
                ok = ok && dev <= 1e-10;
                d += fmt::format("{} u={}: {:.2e}{}; ", p, c, dev, dev <= 1e-10 ? "" : " FAIL");
            }
        }
        ProblemSpec still = to_problem_spec(builtin("expanding"));
        still.velocity = zero_velocity();
        double dev0 = 0.0;
        for (double c : {0.0, 1.0}) {
            dev0 = std::max(dev0, constant_deviation(solve_step(s, still, project_l2(s, constant_field(c))), c));
        }
        fmt::print("  info: with V = 0 both constants deviate by at most {:.2e}\n", dev0);
        d += "tolerance 1e-10";
        return ok;
    });

    timed(9, [&](std::string& d, double& limit) {
        limit = 300;
        fs::remove_all(out_b);
        ExperimentConfig c = expanding;
        c.output_dir = out_b.string();
        (void)run_experiment(c, true);
        const std::string a = slurp(out_a / "timeseries.csv");
        const std::string b = slurp(out_b / "timeseries.csv");
        d = fmt::format("timeseries.csv {} bytes vs {} bytes, {}", a.size(), b.size(),
                        !a.empty() && a == b ? "identical" : "DIFFERENT");
        return !a.empty() && a == b;
    });

    fmt::print("{} of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
