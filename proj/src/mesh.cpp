#include "advac/mesh.hpp"

#include "advac/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <set>

#include <fmt/core.h>

namespace advac {

namespace {

std::atomic<std::uint64_t> next_lineage{1};

constexpr std::uint32_t npos32 = std::numeric_limits<std::uint32_t>::max();

std::pair<VertexId, VertexId> edge_key(VertexId a, VertexId b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

std::pair<VertexId, VertexId> local_edge(const Element& el, int i) {
    return {el.vertices[(i + 1) % 3], el.vertices[(i + 2) % 3]};
}

} // namespace

std::size_t Mesh::active_index(ElementId id) const {
    if (!is_active(id)) {
        throw InvalidArgument(fmt::format("element {} is not active", id));
    }
    return active_index_[id];
}

const std::array<EdgeIndex, 3>& Mesh::element_edges(ElementId id) const {
    return element_edges_[active_index(id)];
}

std::array<Point, 3> Mesh::corners(ElementId id) const {
    const auto& v = elements_.at(id).vertices;
    return {vertices_[v[0]], vertices_[v[1]], vertices_[v[2]]};
}

double Mesh::area(ElementId id) const {
    const auto p = corners(id);
    return 0.5 * cross(p[1] - p[0], p[2] - p[0]);
}

double Mesh::diameter(ElementId id) const {
    const auto p = corners(id);
    double h = 0.0;
    for (int i = 0; i < 3; ++i) {
        const Point d = p[(i + 1) % 3] - p[i];
        h = std::max(h, std::hypot(d.x, d.y));
    }
    return h;
}

double Mesh::min_angle(ElementId id) const {
    const auto p = corners(id);
    double angle = std::numbers::pi;
    for (int i = 0; i < 3; ++i) {
        const Point u = p[(i + 1) % 3] - p[i];
        const Point w = p[(i + 2) % 3] - p[i];
        angle = std::min(angle, std::atan2(std::abs(cross(u, w)), dot(u, w)));
    }
    return angle;
}

void Mesh::rebuild_topology() {
    active_.clear();
    for (ElementId id = 0; id < elements_.size(); ++id) {
        if (elements_[id].status == ElementStatus::active) active_.push_back(id);
    }
    active_index_.assign(elements_.size(), npos32);
    for (std::size_t i = 0; i < active_.size(); ++i) active_index_[active_[i]] = static_cast<std::uint32_t>(i);

    struct LocalEdge {
        std::pair<VertexId, VertexId> key;
        ElementId element;
        int local;
    };
    std::vector<LocalEdge> local;
    local.reserve(3 * active_.size());
    for (ElementId id : active_) {
        for (int i = 0; i < 3; ++i) {
            const auto [a, b] = local_edge(elements_[id], i);
            local.push_back({edge_key(a, b), id, i});
        }
    }
    std::sort(local.begin(), local.end(), [](const LocalEdge& l, const LocalEdge& r) {
        return l.key != r.key ? l.key < r.key : l.element < r.element;
    });

    edges_.clear();
    element_edges_.assign(active_.size(), {npos32, npos32, npos32});
    for (std::size_t i = 0; i < local.size();) {
        std::size_t j = i + 1;
        while (j < local.size() && local[j].key == local[i].key) ++j;
        if (j - i > 2) {
            throw std::logic_error(fmt::format("edge ({},{}) shared by {} elements",
                                               local[i].key.first, local[i].key.second, j - i));
        }
        Edge e;
        e.kind = (j - i == 2) ? EdgeKind::interior : EdgeKind::boundary;
        for (std::size_t s = 0; s < j - i; ++s) {
            e.elements[s] = local[i + s].element;
            e.local_edges[s] = local[i + s].local;
        }
        const auto [a, b] = local_edge(elements_[e.elements[0]], e.local_edges[0]);
        e.vertices = {a, b};
        const Point d = vertices_[b] - vertices_[a];
        e.length = std::hypot(d.x, d.y);
        e.normal = {d.y / e.length, -d.x / e.length};
        const auto index = static_cast<EdgeIndex>(edges_.size());
        for (std::size_t s = 0; s < j - i; ++s) {
            element_edges_[active_index_[e.elements[s]]][e.local_edges[s]] = index;
        }
        edges_.push_back(e);
        i = j;
    }
    ++generation_counter_;
}

VertexId Mesh::midpoint(VertexId a, VertexId b) {
    const auto key = edge_key(a, b);
    if (auto it = midpoints_.find(key); it != midpoints_.end()) return it->second;
    const auto id = static_cast<VertexId>(vertices_.size());
    vertices_.push_back(0.5 * (vertices_[a] + vertices_[b]));
    midpoints_.emplace(key, id);
    return id;
}

// Children of (a, b, c) with refinement edge bc are (m, a, b) and (m, c, a);
// both are counter-clockwise and have the new vertex m as newest vertex.
void Mesh::bisect(ElementId id) {
    const Element parent = elements_[id];
    const int r = parent.refinement_edge;
    const VertexId a = parent.vertices[r];
    const VertexId b = parent.vertices[(r + 1) % 3];
    const VertexId c = parent.vertices[(r + 2) % 3];
    const VertexId m = midpoint(b, c);

    const auto first = static_cast<ElementId>(elements_.size());
    for (const auto& verts : {std::array{m, a, b}, std::array{m, c, a}}) {
        Element child;
        child.vertices = verts;
        child.refinement_edge = 0;
        child.parent = id;
        child.generation = parent.generation + 1;
        elements_.push_back(child);
    }
    elements_[id].children = std::array{first, first + 1};
    elements_[id].status = ElementStatus::refined;
}

Mesh uniform_initial_mesh(int n) {
    if (n < 1) throw InvalidArgument(fmt::format("uniform_initial_mesh: n must be >= 1, got {}", n));
    Mesh mesh;
    const int cells = 2 * n;
    const double h = 2.0 / cells;
    mesh.vertices_.reserve(static_cast<std::size_t>((cells + 1) * (cells + 1)));
    for (int j = 0; j <= cells; ++j) {
        for (int i = 0; i <= cells; ++i) {
            mesh.vertices_.push_back({-1.0 + i * h, -1.0 + j * h});
        }
    }
    auto vid = [cells](int i, int j) { return static_cast<VertexId>(j * (cells + 1) + i); };
    for (int j = 0; j < cells; ++j) {
        for (int i = 0; i < cells; ++i) {
            const VertexId p00 = vid(i, j), p10 = vid(i + 1, j), p11 = vid(i + 1, j + 1), p01 = vid(i, j + 1);
            // right-angle vertex first, so local edge 0 is the hypotenuse
            Element lower;
            lower.vertices = {p10, p11, p00};
            Element upper;
            upper.vertices = {p01, p00, p11};
            mesh.elements_.push_back(lower);
            mesh.elements_.push_back(upper);
        }
    }
    mesh.lineage_ = next_lineage.fetch_add(1);
    mesh.rebuild_topology();
    return mesh;
}

Mesh refine(const Mesh& mesh, std::span<const ElementId> marked, RefineStats* stats) {
    Mesh out = mesh;
    std::vector<char> edge_marked(mesh.edges_.size(), 0);
    std::vector<EdgeIndex> work;
    auto mark_refinement_edge = [&](ElementId id) {
        const EdgeIndex e = mesh.element_edges(id)[mesh.elements_[id].refinement_edge];
        if (!edge_marked[e]) {
            edge_marked[e] = 1;
            work.push_back(e);
        }
    };
    std::size_t n_marked = 0;
    for (ElementId id : marked) {
        if (!mesh.is_active(id)) throw InvalidArgument(fmt::format("refine: element {} is not active", id));
        mark_refinement_edge(id);
        ++n_marked;
    }
    // closure: an element with any marked edge must split its refinement edge
    while (!work.empty()) {
        const Edge& e = mesh.edges_[work.back()];
        work.pop_back();
        for (ElementId id : e.elements) {
            if (id != no_element) mark_refinement_edge(id);
        }
    }

    std::size_t bisections = 0;
    for (ElementId id : mesh.active_) {
        const auto& edges = mesh.element_edges(id);
        const int r = mesh.elements_[id].refinement_edge;
        if (!edge_marked[edges[r]]) continue;
        out.bisect(id);
        ++bisections;
        const auto children = *out.elements_[id].children;
        // child 0 inherits parent edge (r+2)%3, child 1 inherits edge (r+1)%3
        const std::array<int, 2> inherited{(r + 2) % 3, (r + 1) % 3};
        for (int c = 0; c < 2; ++c) {
            if (edge_marked[edges[inherited[c]]]) {
                out.bisect(children[c]);
                ++bisections;
            }
        }
    }
    if (bisections > 0) out.rebuild_topology();
    if (stats) *stats = {n_marked, bisections};
    return out;
}

Mesh coarsen(const Mesh& mesh, std::span<const ElementId> marked, CoarsenStats* stats) {
    std::vector<char> is_marked(mesh.elements_.size(), 0);
    std::set<VertexId> candidates;
    for (ElementId id : marked) {
        if (!mesh.is_active(id)) throw InvalidArgument(fmt::format("coarsen: element {} is not active", id));
        is_marked[id] = 1;
        const Element& el = mesh.elements_[id];
        if (el.parent) candidates.insert(el.vertices[el.refinement_edge]);
    }
    if (stats) *stats = {static_cast<std::size_t>(std::count(is_marked.begin(), is_marked.end(), 1)), 0};
    if (candidates.empty()) return mesh;

    std::vector<std::vector<ElementId>> around(mesh.vertices_.size());
    for (ElementId id : mesh.active_) {
        for (VertexId v : mesh.elements_[id].vertices) {
            if (candidates.count(v)) around[v].push_back(id);
        }
    }

    Mesh out = mesh;
    std::size_t merges = 0;
    for (VertexId m : candidates) {
        const auto& patch = around[m];
        if (patch.size() != 2 && patch.size() != 4) continue;
        bool ok = true;
        std::set<ElementId> parents;
        for (ElementId id : patch) {
            const Element& el = mesh.elements_[id];
            if (!is_marked[id] || !el.parent || el.vertices[el.refinement_edge] != m) {
                ok = false;
                break;
            }
            parents.insert(*el.parent);
        }
        if (!ok || parents.size() * 2 != patch.size()) continue;
        for (ElementId p : parents) {
            const auto& kids = *mesh.elements_[p].children;
            if (!mesh.is_active(kids[0]) || !mesh.is_active(kids[1])) ok = false;
        }
        if (!ok) continue;
        for (ElementId p : parents) {
            Element& parent = out.elements_[p];
            for (ElementId k : *parent.children) out.elements_[k].status = ElementStatus::retired;
            parent.children.reset();
            parent.status = ElementStatus::active;
            ++merges;
        }
    }
    if (merges > 0) out.rebuild_topology();
    if (stats) stats->merges = merges;
    return out;
}

std::string check_mesh(const Mesh& mesh) {
    const auto& verts = mesh.vertices();
    for (ElementId id : mesh.active()) {
        if (!(mesh.area(id) > 0.0)) return fmt::format("element {} has non-positive area", id);
        const auto& el = mesh.elements()[id];
        if (el.children) return fmt::format("active element {} has children", id);
        for (EdgeIndex e : mesh.element_edges(id)) {
            if (e >= mesh.edges().size()) return fmt::format("element {} has an unassigned edge", id);
        }
    }
    for (std::size_t i = 0; i < mesh.edges().size(); ++i) {
        const Edge& e = mesh.edges()[i];
        const Point a = verts[e.vertices[0]];
        const Point b = verts[e.vertices[1]];
        if (std::abs(std::hypot(e.normal.x, e.normal.y) - 1.0) > 1e-14) return fmt::format("edge {} normal not unit", i);
        if (e.kind == EdgeKind::interior) {
            if (!mesh.is_active(e.elements[0]) || !mesh.is_active(e.elements[1])) {
                return fmt::format("interior edge {} lacks two active neighbours", i);
            }
            if (e.elements[0] >= e.elements[1]) return fmt::format("edge {} neighbours out of order", i);
        } else {
            const bool on_boundary = (std::abs(a.x) == 1.0 && a.x == b.x) || (std::abs(a.y) == 1.0 && a.y == b.y);
            if (!on_boundary) return fmt::format("boundary edge {} is not on the domain boundary (hanging node)", i);
        }
        const auto c = mesh.corners(e.elements[0]);
        const Point centroid = (1.0 / 3.0) * (c[0] + c[1] + c[2]);
        if (dot(e.normal, 0.5 * (a + b) - centroid) <= 0.0) return fmt::format("edge {} normal points inward", i);
    }
    return {};
}

double total_active_area(const Mesh& mesh) {
    double area = 0.0;
    for (ElementId id : mesh.active()) area += mesh.area(id);
    return area;
}

double min_active_angle(const Mesh& mesh) {
    double angle = std::numbers::pi;
    for (ElementId id : mesh.active()) angle = std::min(angle, mesh.min_angle(id));
    return angle;
}

} // namespace advac
