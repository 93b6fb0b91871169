#pragma once

#include "advac/mesh.hpp"
#include "advac/problem.hpp"
#include "advac/quadrature.hpp"

#include <array>
#include <vector>

namespace advac {

/// Inflow/outflow tags of one active element's boundary, sampled at the
/// points of a line rule on each local edge (edge i opposite vertex i).
/// A point is inflow when V . n_E < 0 with n_E the outward normal of the
/// element; V . n_E = 0 counts as outflow.
struct ElementFlowPartition {
    ElementId element = no_element;
    std::array<std::vector<double>, 3> v_dot_n;
    std::array<std::vector<bool>, 3> inflow;
};

std::vector<ElementFlowPartition> edge_classification(const Mesh& mesh, const VelocityField& velocity,
                                                      const LineRule& rule);

} // namespace advac
