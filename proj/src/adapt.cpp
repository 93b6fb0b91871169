#include "advac/adapt.hpp"

#include "advac/errors.hpp"

#include <algorithm>
#include <cmath>

namespace advac {

MarkSets mark(const Mesh& mesh, std::span<const ElementIndicator> indicators, const ProblemSpec& spec) {
    if (indicators.size() != mesh.num_active()) {
        throw InvalidArgument("mark: indicators must cover every active element");
    }
    MarkSets sets;
    for (const ElementIndicator& ind : indicators) {
        if (ind.eta_sq > spec.stol_r) {
            sets.refine.push_back(ind.element);
        } else if (ind.eta_sq < spec.stol_c && mesh.elements()[ind.element].generation > 0) {
            sets.coarsen.push_back(ind.element);
        }
    }
    std::sort(sets.refine.begin(), sets.refine.end());
    std::sort(sets.coarsen.begin(), sets.coarsen.end());
    return sets;
}

std::vector<double> initial_approximation_errors(const SpacePtr& space, const ProblemSpec& spec) {
    const ProjectionOptions options{spec.initial_projection_depth};
    const DGFunction g_h = project_l2(space, spec.initial_condition, options);
    const auto& basis = space->basis();
    std::vector<double> errors(space->num_elements());
    for (std::size_t k = 0; k < space->num_elements(); ++k) {
        double sum = 0.0;
        const auto c = g_h.block(k);
        for_each_point(*space, k, spec.initial_condition, options.discontinuity_depth,
                       [&](Point x, double xi, double eta, double w) {
                           const double d = spec.initial_condition(x) - basis.values(xi, eta).dot(c);
                           sum += w * d * d;
                       });
        errors[k] = std::sqrt(sum);
    }
    return errors;
}

Mesh prerefine_initial(const ProblemSpec& spec, const Mesh& mesh0) {
    auto mesh = std::make_shared<const Mesh>(mesh0);
    for (int pass = 0; pass < spec.max_prerefine; ++pass) {
        const SpacePtr space = DGSpace::create(mesh, spec.degree);
        const std::vector<double> errors = initial_approximation_errors(space, spec);
        std::vector<ElementId> marked;
        for (std::size_t k = 0; k < errors.size(); ++k) {
            if (errors[k] > spec.stol_0) marked.push_back(space->element_id(k));
        }
        if (marked.empty()) break;
        mesh = std::make_shared<const Mesh>(refine(*mesh, marked));
    }
    return *mesh;
}

AdaptOutcome adapt_once(const SpacePtr& space, std::span<const ElementIndicator> indicators,
                        const DGFunction& u_prev, const ProblemSpec& spec) {
    const Mesh& mesh = space->mesh();
    AdaptOutcome out{mark(mesh, indicators, spec), space->mesh_ptr(), space, u_prev, 0, 0, {}, {}, false};
    out.elements_before = mesh.num_active();
    out.elements_after = out.elements_before;
    if (out.marks.empty()) return out;

    Mesh refined = refine(mesh, out.marks.refine, &out.refine_stats);
    // marks from the old mesh that closure bisected are no longer active
    std::vector<ElementId> coarsen_marks;
    for (ElementId id : out.marks.coarsen) {
        if (refined.is_active(id)) coarsen_marks.push_back(id);
    }
    auto next = std::make_shared<const Mesh>(coarsen(refined, coarsen_marks, &out.coarsen_stats));
    out.changed = out.refine_stats.bisections > 0 || out.coarsen_stats.merges > 0;
    if (!out.changed) return out;

    out.mesh = next;
    out.space = DGSpace::create(next, space->degree());
    out.u_prev = transfer(u_prev, out.space);
    out.elements_after = next->num_active();
    return out;
}

} // namespace advac
