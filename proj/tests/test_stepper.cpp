#include "advac/config.hpp"
#include "advac/errors.hpp"
#include "advac/forms.hpp"
#include "advac/stepper.hpp"

#include <doctest.h>

#include <cmath>

using namespace advac;

namespace {

SpacePtr make_space(int n, int q = 1) {
    return DGSpace::create(std::make_shared<const Mesh>(uniform_initial_mesh(n)), q);
}

double max_deviation(const DGFunction& u, double value) {
    const DGSpace& s = u.space();
    double worst = 0.0;
    for (std::size_t k = 0; k < s.num_elements(); ++k) {
        for (std::size_t q = 0; q < s.element_rule().size(); ++q) {
            worst = std::max(worst, std::abs(u.value_at_quadrature(k, q) - value));
        }
    }
    return worst;
}

// backward Euler for du/dt = -f(u)/eps by scalar Newton
double scalar_step(double u_prev, double tau, double eps) {
    double u = u_prev;
    for (int i = 0; i < 50; ++i) {
        const double g = u - u_prev + tau * nonlinearity(u) / eps;
        const double dg = 1.0 + tau * nonlinearity_derivative(u) / eps;
        u -= g / dg;
        if (std::abs(g) < 1e-15) break;
    }
    return u;
}

class Recorder : public RunObserver {
public:
    void adapted(const AdaptEvent& e, std::span<const ElementIndicator>) override { events.push_back(e); }
    void step(const StepRecord& r, const DGFunction& u) override {
        records.push_back(r);
        dofs_of_u.push_back(u.space().total_dofs());
    }
    std::vector<AdaptEvent> events;
    std::vector<StepRecord> records;
    std::vector<std::size_t> dofs_of_u;
};

} // namespace

TEST_CASE("constant fixed points without velocity") {
    ProblemSpec spec;
    const SpacePtr s = make_space(2);
    for (double c : {0.0, 1.0}) {
        const DGFunction prev = project_l2(s, constant_field(c));
        NewtonReport report;
        const DGFunction u = solve_step(s, spec, prev, {}, &report);
        CHECK(max_deviation(u, c) < 1e-10);
        CHECK(report.final_residual <= 1e-10);
    }
}

TEST_CASE("spatially constant state follows the scalar backward Euler step") {
    ProblemSpec spec;
    const SpacePtr s = make_space(2);
    for (double c : {0.6, 0.2, 1.3}) {
        const DGFunction prev = project_l2(s, constant_field(c));
        const DGFunction u = solve_step(s, spec, prev);
        CHECK(max_deviation(u, scalar_step(c, spec.tau, spec.epsilon)) < 1e-8);
    }
}

TEST_CASE("Newton converges quadratically on the nonlinear manufactured problem") {
    const ProblemSpec spec = to_problem_spec(builtin_manufactured("nonlinear"));
    const SpacePtr s = make_space(4);
    NewtonReport report;
    const NewtonConfig strict{1e-13, 1e-15, 25, 0.5, 10};
    (void)solve_step(s, spec, project_l2(s, spec.initial_condition), strict, &report);
    const auto& h = report.history;
    REQUIRE(h.size() >= 4);
    // ratios r_{i+1} / r_i^2 stay bounded over the tail
    for (std::size_t i = 1; i + 1 < h.size(); ++i) {
        if (h[i + 1] < 1e-12) break;
        CHECK(h[i + 1] <= 10.0 * h[i] * h[i]);
    }
}

TEST_CASE("Newton failure carries the residual history") {
    const ProblemSpec spec = to_problem_spec(builtin_manufactured("nonlinear"));
    const SpacePtr s = make_space(2);
    const NewtonConfig tight{1e-30, 1e-30, 1, 0.5, 10};
    try {
        (void)solve_step(s, spec, project_l2(s, spec.initial_condition), tight);
        FAIL("expected StepFailure");
    } catch (const StepFailure& e) {
        CHECK(e.history().size() == 2);
        CHECK(e.history()[1] < e.history()[0]);
    }
}

TEST_CASE("one step without marking keeps the mesh") {
    ProblemSpec spec;
    spec.final_time = spec.tau;
    Recorder rec;
    const Mesh mesh = uniform_initial_mesh(2);
    const RunResult r = run(spec, mesh, {}, &rec);
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].adapt_cycles == 0);
    CHECK(r.records[0].dofs == 3 * mesh.num_active());
    CHECK(rec.events.empty());
}

TEST_CASE("step count and bookkeeping") {
    ExperimentConfig c = builtin_expanding(Scale::full);
    const ProblemSpec spec = to_problem_spec(c);
    REQUIRE(spec.num_steps() == 60);
    SUBCASE("uniform run gives J records with constant DoFs") {
        Recorder rec;
        AdaptDriver d;
        d.adaptive = false;
        const RunResult r = run(spec, uniform_initial_mesh(2), d, &rec);
        CHECK(r.records.size() == 60);
        for (const StepRecord& s : r.records) CHECK(s.dofs == 96);
        CHECK(r.records.back().t == doctest::Approx(0.06));
    }
    SUBCASE("adaptive run: dofs match the space and adapt cycles are 0 or 1") {
        ProblemSpec short_spec = spec;
        short_spec.final_time = 0.003;
        Recorder rec;
        const RunResult r = run(short_spec, uniform_initial_mesh(4), {}, &rec);
        REQUIRE(r.records.size() == 3);
        for (std::size_t i = 0; i < r.records.size(); ++i) {
            CHECK(r.records[i].dofs == rec.dofs_of_u[i]);
            CHECK(r.records[i].adapt_cycles >= 0);
            CHECK(r.records[i].adapt_cycles <= 1);
            CHECK(r.records[i].residual <= 1e-10);
        }
        CHECK(r.final.space().total_dofs() == r.records.back().dofs);
    }
}

TEST_CASE("non-integral step count is a config error") {
    ProblemSpec spec;
    spec.final_time = 0.0025;
    CHECK_THROWS_AS(spec.num_steps(), ConfigError);
}
