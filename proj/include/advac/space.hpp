#pragma once

#include "advac/basis.hpp"
#include "advac/mesh.hpp"
#include "advac/problem.hpp"
#include "advac/quadrature.hpp"

#include <functional>
#include <memory>

#include <Eigen/Dense>

namespace advac {

/// Affine map x = origin + jacobian * (xi, eta) from the reference triangle.
struct ElementGeometry {
    Point origin;
    Eigen::Matrix2d jacobian;
    Eigen::Matrix2d inverse;
    double det = 0.0; // 2 |E|
    double area = 0.0;
    double diameter = 0.0;

    Point map(double xi, double eta) const;
    std::array<double, 2> to_reference(Point x) const;
    /// Physical gradients from reference gradients (rows are functions).
    Eigen::MatrixX2d physical_gradients(const Eigen::MatrixX2d& reference) const {
        return reference * inverse;
    }
};

ElementGeometry element_geometry(const Mesh& mesh, ElementId id);

/// Basis values and physical gradients of one element at one point.
struct BasisSample {
    Eigen::VectorXd values;
    Eigen::MatrixX2d gradients;
};

/// Discontinuous P^q space on the active elements of a mesh. Degrees of
/// freedom are element-major: block k belongs to mesh.active()[k].
class DGSpace {
public:
    DGSpace(std::shared_ptr<const Mesh> mesh, int degree);

    static std::shared_ptr<const DGSpace> create(std::shared_ptr<const Mesh> mesh, int degree) {
        return std::make_shared<const DGSpace>(std::move(mesh), degree);
    }

    const Mesh& mesh() const { return *mesh_; }
    const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
    std::uint64_t mesh_stamp() const { return stamp_; }

    int degree() const { return basis_.degree(); }
    int dofs_per_element() const { return basis_.size(); }
    std::size_t num_elements() const { return mesh_->num_active(); }
    std::size_t total_dofs() const { return num_elements() * static_cast<std::size_t>(dofs_per_element()); }

    const ReferenceBasis& basis() const { return basis_; }
    const TriangleRule& element_rule() const { return element_rule_; }
    const LineRule& edge_rule() const { return edge_rule_; }

    ElementId element_id(std::size_t k) const { return mesh_->active()[k]; }
    std::size_t block_of(ElementId id) const { return mesh_->active_index(id); }
    const ElementGeometry& geometry(std::size_t k) const { return geometry_[k]; }

    /// Basis values at element quadrature points: (points x dofs).
    const Eigen::MatrixXd& basis_table() const { return values_; }
    /// Reference gradients at element quadrature point q: (dofs x 2).
    const Eigen::MatrixX2d& reference_gradients(std::size_t q) const { return gradients_[q]; }
    /// Reference Hessians at element quadrature point q: (dofs x 3).
    const Eigen::MatrixX3d& reference_hessians(std::size_t q) const { return hessians_[q]; }

    Point quadrature_point(std::size_t k, std::size_t q) const {
        return geometry_[k].map(element_rule_.xi(q), element_rule_.eta(q));
    }
    /// Physical weight of element quadrature point q on block k.
    double quadrature_weight(std::size_t k, std::size_t q) const {
        return element_rule_.weights[q] * geometry_[k].det;
    }

    /// Basis of block k sampled at an arbitrary physical point.
    BasisSample sample(std::size_t k, Point x) const;

private:
    std::shared_ptr<const Mesh> mesh_;
    std::uint64_t stamp_;
    ReferenceBasis basis_;
    TriangleRule element_rule_;
    LineRule edge_rule_;
    std::vector<ElementGeometry> geometry_;
    Eigen::MatrixXd values_;
    std::vector<Eigen::MatrixX2d> gradients_;
    std::vector<Eigen::MatrixX3d> hessians_;
};

using SpacePtr = std::shared_ptr<const DGSpace>;

class DGFunction {
public:
    explicit DGFunction(SpacePtr space);
    DGFunction(SpacePtr space, Eigen::VectorXd coefficients);

    const DGSpace& space() const { return *space_; }
    const SpacePtr& space_ptr() const { return space_; }

    Eigen::VectorXd& coefficients() { return coeffs_; }
    const Eigen::VectorXd& coefficients() const { return coeffs_; }

    auto block(std::size_t k) const {
        const int n = space_->dofs_per_element();
        return coeffs_.segment(static_cast<Eigen::Index>(k) * n, n);
    }

    /// Value / gradient of the polynomial of block k at a physical point.
    double value_at(std::size_t k, Point x) const;
    Point gradient_at(std::size_t k, Point x) const;
    /// Value at element quadrature point q of block k (tabulated).
    double value_at_quadrature(std::size_t k, std::size_t q) const;
    Point gradient_at_quadrature(std::size_t k, std::size_t q) const;

private:
    SpacePtr space_;
    Eigen::VectorXd coeffs_;
};

/// Value of u on an active element at reference coordinates (xi, eta).
double evaluate(const DGFunction& u, ElementId element, double xi, double eta);
Point evaluate_gradient(const DGFunction& u, ElementId element, double xi, double eta);

/// Jump u|E_i n_e - u|E_j n_e stored as its scalar factor (u_i - u_j) along the edge normal,
/// and the average, at a point of an interior edge.
struct EdgeTrace {
    double jump = 0.0;
    double average = 0.0;
};
EdgeTrace edge_trace(const DGFunction& u, EdgeIndex edge, Point x);

struct ProjectionOptions {
    /// When positive, sub-triangles on which f is not constant are split
    /// recursively up to this depth (for piecewise constant data).
    int discontinuity_depth = 0;
};

/// Elementwise L2 projection.
DGFunction project_l2(SpacePtr space, const ScalarField& f, ProjectionOptions options = {});

/// Visits quadrature points (physical point, reference coords, physical weight)
/// of block k, sub-dividing where `probe` jumps if depth > 0.
void for_each_point(const DGSpace& space, std::size_t k, const ScalarField& probe, int depth,
                    const std::function<void(Point, double, double, double)>& visit);

/// Moves u_old onto a space whose mesh came from u_old's mesh by refine
/// and/or coarsen: exact on refined elements, L2 projection on merged ones.
DGFunction transfer(const DGFunction& u_old, SpacePtr new_space);

/// L2 norm of u over block k.
double l2_norm_element(const DGFunction& u, std::size_t k);

} // namespace advac
