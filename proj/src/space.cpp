#include "advac/space.hpp"

#include "advac/errors.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

namespace advac {

Point ElementGeometry::map(double xi, double eta) const {
    return {origin.x + jacobian(0, 0) * xi + jacobian(0, 1) * eta,
            origin.y + jacobian(1, 0) * xi + jacobian(1, 1) * eta};
}

std::array<double, 2> ElementGeometry::to_reference(Point x) const {
    const double dx = x.x - origin.x;
    const double dy = x.y - origin.y;
    return {inverse(0, 0) * dx + inverse(0, 1) * dy, inverse(1, 0) * dx + inverse(1, 1) * dy};
}

ElementGeometry element_geometry(const Mesh& mesh, ElementId id) {
    const auto p = mesh.corners(id);
    ElementGeometry g;
    g.origin = p[0];
    g.jacobian << p[1].x - p[0].x, p[2].x - p[0].x, p[1].y - p[0].y, p[2].y - p[0].y;
    g.det = g.jacobian.determinant();
    if (!(g.det > 0.0)) throw std::logic_error(fmt::format("element {} is degenerate or inverted", id));
    g.inverse = g.jacobian.inverse();
    g.area = 0.5 * g.det;
    g.diameter = mesh.diameter(id);
    return g;
}

DGSpace::DGSpace(std::shared_ptr<const Mesh> mesh, int degree)
    : mesh_(std::move(mesh)),
      stamp_(mesh_->generation_counter()),
      basis_(degree),
      element_rule_(triangle_rule(2 * degree + 2)),
      edge_rule_(line_rule(2 * degree + 2)) {
    if (degree < 1) throw InvalidArgument(fmt::format("DG degree must be >= 1, got {}", degree));
    geometry_.reserve(mesh_->num_active());
    for (ElementId id : mesh_->active()) geometry_.push_back(element_geometry(*mesh_, id));
    const auto nq = element_rule_.size();
    values_.resize(static_cast<Eigen::Index>(nq), basis_.size());
    for (std::size_t q = 0; q < nq; ++q) {
        values_.row(static_cast<Eigen::Index>(q)) = basis_.values(element_rule_.xi(q), element_rule_.eta(q)).transpose();
        gradients_.push_back(basis_.gradients(element_rule_.xi(q), element_rule_.eta(q)));
        hessians_.push_back(basis_.hessians(element_rule_.xi(q), element_rule_.eta(q)));
    }
}

BasisSample DGSpace::sample(std::size_t k, Point x) const {
    const auto& g = geometry_[k];
    const auto r = g.to_reference(x);
    return {basis_.values(r[0], r[1]), g.physical_gradients(basis_.gradients(r[0], r[1]))};
}

DGFunction::DGFunction(SpacePtr space) : space_(std::move(space)) {
    coeffs_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space_->total_dofs()));
}

DGFunction::DGFunction(SpacePtr space, Eigen::VectorXd coefficients)
    : space_(std::move(space)), coeffs_(std::move(coefficients)) {
    if (coeffs_.size() != static_cast<Eigen::Index>(space_->total_dofs())) {
        throw InvalidArgument(fmt::format("coefficient vector has length {}, space has {} dofs", coeffs_.size(),
                                          space_->total_dofs()));
    }
}

double DGFunction::value_at(std::size_t k, Point x) const {
    const auto& g = space_->geometry(k);
    const auto r = g.to_reference(x);
    return space_->basis().values(r[0], r[1]).dot(block(k));
}

Point DGFunction::gradient_at(std::size_t k, Point x) const {
    const auto& g = space_->geometry(k);
    const auto r = g.to_reference(x);
    const Eigen::RowVector2d grad = block(k).transpose() * g.physical_gradients(space_->basis().gradients(r[0], r[1]));
    return {grad[0], grad[1]};
}

double DGFunction::value_at_quadrature(std::size_t k, std::size_t q) const {
    return space_->basis_table().row(static_cast<Eigen::Index>(q)).dot(block(k));
}

Point DGFunction::gradient_at_quadrature(std::size_t k, std::size_t q) const {
    const Eigen::RowVector2d grad =
        block(k).transpose() * space_->geometry(k).physical_gradients(space_->reference_gradients(q));
    return {grad[0], grad[1]};
}

double evaluate(const DGFunction& u, ElementId element, double xi, double eta) {
    const std::size_t k = u.space().block_of(element); // throws for inactive elements
    return u.space().basis().values(xi, eta).dot(u.block(k));
}

Point evaluate_gradient(const DGFunction& u, ElementId element, double xi, double eta) {
    const std::size_t k = u.space().block_of(element);
    const Eigen::RowVector2d grad =
        u.block(k).transpose() * u.space().geometry(k).physical_gradients(u.space().basis().gradients(xi, eta));
    return {grad[0], grad[1]};
}

EdgeTrace edge_trace(const DGFunction& u, EdgeIndex edge, Point x) {
    const Mesh& mesh = u.space().mesh();
    const Edge& e = mesh.edges().at(edge);
    const double inside = u.value_at(mesh.active_index(e.elements[0]), x);
    if (e.kind == EdgeKind::boundary) return {inside, inside};
    const double outside = u.value_at(mesh.active_index(e.elements[1]), x);
    return {inside - outside, 0.5 * (inside + outside)};
}

namespace {

struct SubTriangle {
    std::array<double, 2> a, b, c; // reference coordinates
};

void visit_sub(const DGSpace& space, std::size_t k, const ScalarField& probe, int depth, const SubTriangle& t,
               const std::function<void(Point, double, double, double)>& visit) {
    const auto& rule = space.element_rule();
    const auto& g = space.geometry(k);
    const double sub_det = (t.b[0] - t.a[0]) * (t.c[1] - t.a[1]) - (t.c[0] - t.a[0]) * (t.b[1] - t.a[1]);
    auto ref_point = [&](double s, double r) {
        return std::array{t.a[0] + s * (t.b[0] - t.a[0]) + r * (t.c[0] - t.a[0]),
                          t.a[1] + s * (t.b[1] - t.a[1]) + r * (t.c[1] - t.a[1])};
    };
    if (depth > 0 && probe) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        auto probe_at = [&](std::array<double, 2> r) {
            const double v = probe(g.map(r[0], r[1]));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        };
        probe_at(t.a);
        probe_at(t.b);
        probe_at(t.c);
        for (std::size_t q = 0; q < rule.size(); ++q) probe_at(ref_point(rule.xi(q), rule.eta(q)));
        if (lo != hi) {
            auto mid = [](std::array<double, 2> p, std::array<double, 2> q) {
                return std::array{0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])};
            };
            const auto ab = mid(t.a, t.b), bc = mid(t.b, t.c), ca = mid(t.c, t.a);
            for (const SubTriangle& s : {SubTriangle{t.a, ab, ca}, SubTriangle{ab, t.b, bc}, SubTriangle{ca, bc, t.c},
                                         SubTriangle{bc, ca, ab}}) {
                visit_sub(space, k, probe, depth - 1, s, visit);
            }
            return;
        }
    }
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto r = ref_point(rule.xi(q), rule.eta(q));
        visit(g.map(r[0], r[1]), r[0], r[1], rule.weights[q] * sub_det * g.det);
    }
}

} // namespace

void for_each_point(const DGSpace& space, std::size_t k, const ScalarField& probe, int depth,
                    const std::function<void(Point, double, double, double)>& visit) {
    visit_sub(space, k, probe, depth, SubTriangle{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}, visit);
}

DGFunction project_l2(SpacePtr space, const ScalarField& f, ProjectionOptions options) {
    DGFunction out(space);
    const int n = space->dofs_per_element();
    const auto& rule = space->element_rule();
    for (std::size_t k = 0; k < space->num_elements(); ++k) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
        if (options.discontinuity_depth > 0) {
            const auto& basis = space->basis();
            for_each_point(*space, k, f, options.discontinuity_depth, [&](Point x, double xi, double eta, double w) {
                c += (w * f(x)) * basis.values(xi, eta);
            });
        } else {
            for (std::size_t q = 0; q < rule.size(); ++q) {
                c += (space->quadrature_weight(k, q) * f(space->quadrature_point(k, q))) *
                     space->basis_table().row(static_cast<Eigen::Index>(q)).transpose();
            }
        }
        // orthonormal reference basis: the local mass matrix is det * I
        out.coefficients().segment(static_cast<Eigen::Index>(k) * n, n) = c / space->geometry(k).det;
    }
    return out;
}

DGFunction transfer(const DGFunction& u_old, SpacePtr new_space) {
    const Mesh& old_mesh = u_old.space().mesh();
    const Mesh& new_mesh = new_space->mesh();
    if (old_mesh.lineage() != new_mesh.lineage() || new_mesh.elements().size() < old_mesh.elements().size() ||
        new_mesh.generation_counter() < old_mesh.generation_counter()) {
        throw InvalidArgument("transfer: target mesh does not descend from the source mesh");
    }
    if (new_space->degree() != u_old.space().degree()) {
        throw InvalidArgument("transfer: polynomial degrees differ");
    }
    if (&old_mesh == &new_mesh || old_mesh.generation_counter() == new_mesh.generation_counter()) {
        return DGFunction(new_space, u_old.coefficients());
    }

    DGFunction out(new_space);
    const int n = new_space->dofs_per_element();
    const auto& rule = new_space->element_rule();
    const auto& basis = new_space->basis();
    const auto& old_elements = old_mesh.elements();

    for (std::size_t k = 0; k < new_space->num_elements(); ++k) {
        const ElementId id = new_space->element_id(k);
        const auto& geo = new_space->geometry(k);
        Eigen::VectorXd c = Eigen::VectorXd::Zero(n);

        // nearest ancestor (or self) that is active in the old mesh
        std::optional<ElementId> ancestor;
        for (std::optional<ElementId> a = id; a; a = new_mesh.elements()[*a].parent) {
            if (old_mesh.is_active(*a)) {
                ancestor = a;
                break;
            }
        }
        if (ancestor) {
            const std::size_t ko = old_mesh.active_index(*ancestor);
            if (*ancestor == id) {
                out.coefficients().segment(static_cast<Eigen::Index>(k) * n, n) = u_old.block(ko);
                continue;
            }
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const Point x = new_space->quadrature_point(k, q);
                c += (rule.weights[q] * u_old.value_at(ko, x)) *
                     new_space->basis_table().row(static_cast<Eigen::Index>(q)).transpose();
            }
        } else {
            // merged element: integrate the old piecewise polynomial over its old leaves
            std::vector<ElementId> stack{id};
            std::size_t leaves = 0;
            while (!stack.empty()) {
                const ElementId e = stack.back();
                stack.pop_back();
                if (old_mesh.is_active(e)) {
                    const std::size_t ko = old_mesh.active_index(e);
                    const auto& old_geo = u_old.space().geometry(ko);
                    for (std::size_t q = 0; q < rule.size(); ++q) {
                        const Point x = old_geo.map(rule.xi(q), rule.eta(q));
                        const auto r = geo.to_reference(x);
                        c += (rule.weights[q] * old_geo.det / geo.det * u_old.value_at_quadrature(ko, q)) *
                             basis.values(r[0], r[1]);
                    }
                    ++leaves;
                } else if (e < old_elements.size() && old_elements[e].children) {
                    for (ElementId child : *old_elements[e].children) stack.push_back(child);
                }
            }
            if (leaves == 0) {
                throw InvalidArgument(fmt::format("transfer: element {} has no counterpart in the source mesh", id));
            }
        }
        out.coefficients().segment(static_cast<Eigen::Index>(k) * n, n) = c;
    }
    return out;
}

double l2_norm_element(const DGFunction& u, std::size_t k) {
    // orthonormal basis: ||u||^2 = det * |c|^2
    return std::sqrt(u.space().geometry(k).det) * u.block(k).norm();
}

} // namespace advac
