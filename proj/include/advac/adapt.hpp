#pragma once

#include "advac/estimator.hpp"
#include "advac/mesh.hpp"
#include "advac/space.hpp"

#include <memory>
#include <span>
#include <vector>

namespace advac {

/// Threshold marking: refine where eta_E^2 > stol_r, coarsen where
/// eta_E^2 < stol_c on elements that are not part of the initial mesh.
struct MarkSets {
    std::vector<ElementId> refine;
    std::vector<ElementId> coarsen;

    bool empty() const { return refine.empty() && coarsen.empty(); }
};

MarkSets mark(const Mesh& mesh, std::span<const ElementIndicator> indicators, const ProblemSpec& spec);

/// ||g - g_h||_{L2(E)} for every active element (block order).
std::vector<double> initial_approximation_errors(const SpacePtr& space, const ProblemSpec& spec);

/// Refines the uniform initial mesh where the initial condition is poorly
/// approximated, until max_E ||g - g_h||_{L2(E)} <= stol_0 or max_prerefine
/// passes have run.
Mesh prerefine_initial(const ProblemSpec& spec, const Mesh& mesh0);

struct AdaptOutcome {
    MarkSets marks;
    std::shared_ptr<const Mesh> mesh;
    SpacePtr space;
    DGFunction u_prev;
    std::size_t elements_before = 0;
    std::size_t elements_after = 0;
    RefineStats refine_stats;
    CoarsenStats coarsen_stats;
    bool changed = false;
};

/// mark -> refine -> coarsen -> new space -> transfer of u_prev.
AdaptOutcome adapt_once(const SpacePtr& space, std::span<const ElementIndicator> indicators,
                        const DGFunction& u_prev, const ProblemSpec& spec);

} // namespace advac
