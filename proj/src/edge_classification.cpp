#include "advac/edge_classification.hpp"

namespace advac {

std::vector<ElementFlowPartition> edge_classification(const Mesh& mesh, const VelocityField& velocity,
                                                      const LineRule& rule) {
    std::vector<ElementFlowPartition> out;
    out.reserve(mesh.num_active());
    for (ElementId id : mesh.active()) {
        ElementFlowPartition part;
        part.element = id;
        const auto& edges = mesh.element_edges(id);
        const auto& verts = mesh.elements()[id].vertices;
        for (int i = 0; i < 3; ++i) {
            const Edge& e = mesh.edges()[edges[i]];
            const Point n = e.elements[0] == id ? e.normal : -1.0 * e.normal;
            const Point a = mesh.vertices()[verts[(i + 1) % 3]];
            const Point b = mesh.vertices()[verts[(i + 2) % 3]];
            for (double s : rule.points) {
                const double vn = dot(velocity(a + s * (b - a)), n);
                part.v_dot_n[i].push_back(vn);
                part.inflow[i].push_back(vn < 0.0);
            }
        }
        out.push_back(std::move(part));
    }
    return out;
}

} // namespace advac
