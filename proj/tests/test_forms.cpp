#include "advac/errors.hpp"
#include "advac/forms.hpp"
#include "advac/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

using namespace advac;

namespace {

SpacePtr make_space(int n, int q = 1) {
    return DGSpace::create(std::make_shared<const Mesh>(uniform_initial_mesh(n)), q);
}

SpacePtr refined_space(int n, std::vector<ElementId> marks, int q = 1) {
    return DGSpace::create(std::make_shared<const Mesh>(refine(uniform_initial_mesh(n), marks)), q);
}

Eigen::VectorXd random_vector(Eigen::Index n, unsigned seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(lo, hi);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = d(rng);
    return v;
}

double bilinear(const SparseMatrix& a, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    // row = test function
    return v.dot(a * u);
}

Point edge_point(const Mesh& m, const Edge& e, double s) {
    const Point a = m.vertices()[e.vertices[0]], b = m.vertices()[e.vertices[1]];
    return a + s * (b - a);
}

} // namespace

TEST_CASE("double-well nonlinearity") {
    CHECK(nonlinearity(0.0) == 0.0);
    CHECK(nonlinearity(1.0) == 0.0);
    CHECK(nonlinearity(0.5) == 0.0);
    CHECK(nonlinearity(0.25) == doctest::Approx(0.1875).epsilon(1e-15));
    for (double u : {-1.0, 0.3, 2.0}) {
        const double h = 1e-6;
        const double fd = (nonlinearity(u + h) - nonlinearity(u - h)) / (2 * h);
        CHECK(std::abs(fd - nonlinearity_derivative(u)) < 1e-8);
        CHECK(nonlinearity(u) == doctest::Approx(2 * u - 6 * u * u + 4 * u * u * u));
    }
}

TEST_CASE("a_h(1, 1) = |Omega| / tau without velocity") {
    ProblemSpec spec;
    spec.tau = 0.01;
    for (int n : {1, 3}) {
        const SpacePtr s = make_space(n);
        const DGFunction one = project_l2(s, constant_field(1.0));
        const SparseMatrix a = assemble_bilinear(*s, spec);
        CHECK(bilinear(a, one.coefficients(), one.coefficients()) == doctest::Approx(4.0 / spec.tau).epsilon(1e-12));
    }
}

TEST_CASE("local D_h block matches P1 stiffness plus mass in the nodal basis") {
    ProblemSpec spec;
    spec.epsilon = 1.0;
    spec.tau = 1.0;
    const SpacePtr s = make_space(1);
    const BilinearParts parts = assemble_bilinear_parts(*s, spec);
    const Eigen::MatrixXd d(parts.diffusion_reaction);
    const Mesh& m = s->mesh();
    for (std::size_t k = 0; k < s->num_elements(); ++k) {
        const ElementId id = s->element_id(k);
        const double area = m.area(id);
        // V(j, i) = phi_i at vertex j; nodal = V^{-T} modal V^{-1}
        Eigen::Matrix3d vand;
        const double ref[3][2] = {{0, 0}, {1, 0}, {0, 1}};
        for (int j = 0; j < 3; ++j) vand.row(j) = s->basis().values(ref[j][0], ref[j][1]).transpose();
        const Eigen::Matrix3d vinv = vand.inverse();
        const auto block = d.block(static_cast<Eigen::Index>(3 * k), static_cast<Eigen::Index>(3 * k), 3, 3);
        const Eigen::Matrix3d nodal = vinv.transpose() * block * vinv;

        Eigen::Matrix3d mass;
        mass << 2, 1, 1, 1, 2, 1, 1, 1, 2;
        mass *= area / 12.0;
        // P1 stiffness from barycentric gradients
        const auto c = m.corners(id);
        Eigen::Matrix3d stiff;
        Point grad[3];
        for (int i = 0; i < 3; ++i) {
            const Point e = c[(i + 2) % 3] - c[(i + 1) % 3]; // edge opposite vertex i
            grad[i] = {-e.y / (2 * area), e.x / (2 * area)};
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) stiff(i, j) = area * dot(grad[i], grad[j]);
        }
        CHECK((nodal - (stiff + mass)).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("SIPG part is symmetric without velocity") {
    ProblemSpec spec;
    spec.epsilon = 0.3;
    for (const SpacePtr& s : {make_space(2), refined_space(2, {1, 4, 9}), refined_space(1, {0}, 2)}) {
        const BilinearParts p = assemble_bilinear_parts(*s, spec);
        const Eigen::MatrixXd sym(SparseMatrix(p.diffusion_reaction + p.consistency + p.penalty));
        CHECK((sym - sym.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("K_h and J_h vanish on continuous piecewise linears") {
    ProblemSpec spec;
    spec.epsilon = 0.7;
    const SpacePtr s = make_space(2);
    // |x| + 0.5 |y| is P1 on every square of the grid and continuous
    const DGFunction v = project_l2(s, [](Point p) { return std::abs(p.x) + 0.5 * std::abs(p.y); });
    const BilinearParts p = assemble_bilinear_parts(*s, spec);
    const Eigen::VectorXd& c = v.coefficients();
    CHECK(std::abs(bilinear(p.consistency, c, c)) < 1e-12);
    CHECK((p.penalty * c).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("upwind convection reduces to the continuous form for continuous data") {
    ProblemSpec spec;
    spec.velocity = sheer_velocity(100.0);
    const SpacePtr s = refined_space(2, {2, 11});
    const ScalarField uf = [](Point p) { return 0.3 + p.x - 2.0 * p.y; };
    const ScalarField vf = [](Point p) { return 1.0 - 0.5 * p.x + 0.25 * p.y; };
    const DGFunction u = project_l2(s, uf);
    const DGFunction v = project_l2(s, vf);
    const BilinearParts p = assemble_bilinear_parts(*s, spec);
    const double discrete = bilinear(p.convection, u.coefficients(), v.coefficients());

    double oracle = 0.0;
    for (std::size_t k = 0; k < s->num_elements(); ++k) {
        for (std::size_t q = 0; q < s->element_rule().size(); ++q) {
            const Point x = s->quadrature_point(k, q);
            const Point gv{-0.5, 0.25};
            oracle -= s->quadrature_weight(k, q) * uf(x) * dot(spec.velocity(x), gv);
        }
    }
    const LineRule rule = line_rule(6);
    for (const Edge& e : s->mesh().edges()) {
        if (e.kind != EdgeKind::boundary) continue;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point x = edge_point(s->mesh(), e, rule.points[q]);
            const double beta = dot(spec.velocity(x), e.normal);
            if (beta >= 0.0) oracle += rule.weights[q] * e.length * beta * uf(x) * vf(x);
        }
    }
    CHECK(discrete == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("zeroth-order coefficient of D_h is 1/tau whatever the divergence") {
    ProblemSpec a, b;
    a.velocity = expanding_velocity(10.0);
    b.velocity = sheer_velocity(100.0);
    const SpacePtr s = refined_space(2, {0, 5});
    const Eigen::MatrixXd da(assemble_bilinear_parts(*s, a).diffusion_reaction);
    const Eigen::MatrixXd db(assemble_bilinear_parts(*s, b).diffusion_reaction);
    CHECK((da - db).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("coercivity") {
    SUBCASE("a_h(v, v) > 0 for random v with the default penalty") {
        for (const char* which : {"none", "expanding", "sheer"}) {
            ProblemSpec spec;
            spec.epsilon = 0.01;
            if (std::string(which) == "expanding") spec.velocity = expanding_velocity(10.0);
            if (std::string(which) == "sheer") spec.velocity = sheer_velocity(100.0);
            const SpacePtr s = refined_space(2, {0, 3, 6, 17});
            const SparseMatrix a = assemble_bilinear(*s, spec);
            CHECK(coercivity_probe(a, 100, 9u) > 0.0);
        }
    }
    SUBCASE("non-positive kappa0 is rejected") {
        ProblemSpec spec;
        spec.velocity = sheer_velocity(3000.0);
        try {
            (void)assemble_bilinear(*make_space(1), spec);
            FAIL("expected CoercivityError");
        } catch (const CoercivityError& e) {
            CHECK(e.min_divergence() == doctest::Approx(-3000.0));
        }
    }
}

TEST_CASE("right-hand side") {
    ProblemSpec spec;
    spec.tau = 0.02;
    const SpacePtr s = refined_space(1, {0, 5});
    SUBCASE("zero data gives a zero vector") {
        CHECK(assemble_rhs(*s, spec, DGFunction(s)).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("u_prev = 1 tested against 1 gives |E| / tau") {
        const DGFunction one = project_l2(s, constant_field(1.0));
        const Eigen::VectorXd rhs = assemble_rhs(*s, spec, one);
        for (std::size_t k = 0; k < s->num_elements(); ++k) {
            const double entry = rhs.segment(static_cast<Eigen::Index>(3 * k), 3).dot(one.block(k));
            CHECK(entry == doctest::Approx(s->mesh().area(s->element_id(k)) / spec.tau).epsilon(1e-13));
        }
    }
    SUBCASE("random u_prev: rhs = M c / tau against a quadrature mass matrix") {
        const DGFunction u(s, random_vector(static_cast<Eigen::Index>(s->total_dofs()), 4));
        const Eigen::VectorXd rhs = assemble_rhs(*s, spec, u);
        for (std::size_t k = 0; k < s->num_elements(); ++k) {
            Eigen::Matrix3d mass = Eigen::Matrix3d::Zero();
            for (std::size_t q = 0; q < s->element_rule().size(); ++q) {
                const Eigen::Vector3d phi = s->basis_table().row(static_cast<Eigen::Index>(q)).transpose();
                mass += s->quadrature_weight(k, q) * phi * phi.transpose();
            }
            const Eigen::Vector3d expect = mass * u.block(k) / spec.tau;
            CHECK((rhs.segment(static_cast<Eigen::Index>(3 * k), 3) - expect).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    SUBCASE("u_prev on another space is rejected") {
        CHECK_THROWS_AS(assemble_rhs(*s, spec, DGFunction(make_space(1))), InvalidArgument);
    }
}

TEST_CASE("residual of constant states") {
    ProblemSpec spec;
    const SpacePtr s = refined_space(2, {1, 2});
    SUBCASE("u = u_prev = 0") {
        const DGFunction z(s);
        CHECK(assemble_residual_and_jacobian(*s, spec, z, z).residual.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("u = u_prev = 0.5") {
        const DGFunction h = project_l2(s, constant_field(0.5));
        CHECK(assemble_residual_and_jacobian(*s, spec, h, h).residual.norm() < 1e-12 / spec.tau);
    }
}

TEST_CASE("Jacobian matches finite differences on the 8-triangle mesh") {
    ProblemSpec spec;
    spec.epsilon = 0.05;
    spec.velocity = expanding_velocity(10.0);
    const SpacePtr s = make_space(1);
    REQUIRE(s->num_elements() == 8);
    const auto n = static_cast<Eigen::Index>(s->total_dofs());
    const DGFunction u(s, random_vector(n, 21, -0.5, 1.5));
    const DGFunction u_prev(s, random_vector(n, 22, 0.0, 1.0));
    const ResidualJacobian rj = assemble_residual_and_jacobian(*s, spec, u, u_prev);
    const Eigen::MatrixXd jac(rj.jacobian);
    Eigen::MatrixXd fd(n, n);
    const double h = 1e-7;
    for (Eigen::Index j = 0; j < n; ++j) {
        DGFunction p = u, m = u;
        p.coefficients()[j] += h;
        m.coefficients()[j] -= h;
        fd.col(j) = (assemble_residual_and_jacobian(*s, spec, p, u_prev).residual -
                     assemble_residual_and_jacobian(*s, spec, m, u_prev).residual) /
                    (2 * h);
    }
    CHECK((fd - jac).norm() / jac.norm() < 1e-6);
}

TEST_CASE("sparsity couples only elements sharing an edge") {
    ProblemSpec spec;
    spec.velocity = expanding_velocity(10.0);
    const SpacePtr s = refined_space(2, {0, 7});
    const SparseMatrix a = assemble_bilinear(*s, spec);
    const Mesh& m = s->mesh();
    std::set<std::pair<std::size_t, std::size_t>> neighbours;
    for (const Edge& e : m.edges()) {
        if (e.kind != EdgeKind::interior) continue;
        neighbours.insert({s->block_of(e.elements[0]), s->block_of(e.elements[1])});
        neighbours.insert({s->block_of(e.elements[1]), s->block_of(e.elements[0])});
    }
    for (int col = 0; col < a.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
            const std::size_t bi = static_cast<std::size_t>(it.row()) / 3, bj = static_cast<std::size_t>(it.col()) / 3;
            CHECK((bi == bj || neighbours.contains({bi, bj})));
        }
    }
}

TEST_CASE("COO matrix dump") {
    ProblemSpec spec;
    const SpacePtr s = make_space(1);
    const SparseMatrix a = assemble_bilinear(*s, spec);
    const auto path = std::filesystem::temp_directory_path() / "advac_coo_test.txt";
    write_matrix_coo(path.string(), a);
    std::ifstream in(path);
    int r, c;
    double v;
    Eigen::MatrixXd back = Eigen::MatrixXd::Zero(a.rows(), a.cols());
    std::size_t count = 0;
    while (in >> r >> c >> v) {
        back(r, c) = v;
        ++count;
    }
    CHECK(count == static_cast<std::size_t>(a.nonZeros()));
    CHECK((back - Eigen::MatrixXd(a)).cwiseAbs().maxCoeff() == 0.0);
    std::filesystem::remove(path);
}
