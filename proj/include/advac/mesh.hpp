#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace advac {

using VertexId = std::uint32_t;
using ElementId = std::uint32_t;
using EdgeIndex = std::uint32_t;

inline constexpr ElementId no_element = std::numeric_limits<ElementId>::max();

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }

enum class ElementStatus : std::uint8_t {
    active,
    refined, // bisected, has two children
    retired  // a child that was merged back into its parent
};

/// Triangle in counter-clockwise order. Local edge i is the edge opposite
/// vertex i, so the newest vertex is vertices[refinement_edge].
struct Element {
    std::array<VertexId, 3> vertices{};
    int refinement_edge = 0;
    std::optional<ElementId> parent;
    int generation = 0;
    std::optional<std::array<ElementId, 2>> children;
    ElementStatus status = ElementStatus::active;
};

enum class EdgeKind : std::uint8_t { interior, boundary };

/// An edge of the active triangulation. elements[0] is the lower-indexed
/// neighbour; the normal points out of elements[0]. vertices are ordered
/// counter-clockwise as seen from elements[0].
struct Edge {
    std::array<VertexId, 2> vertices{};
    EdgeKind kind = EdgeKind::boundary;
    std::array<ElementId, 2> elements{no_element, no_element};
    std::array<int, 2> local_edges{-1, -1};
    double length = 0.0;
    Point normal;
};

struct RefineStats {
    std::size_t marked = 0;
    std::size_t bisections = 0; // every bisection adds one active element
};

struct CoarsenStats {
    std::size_t marked = 0;
    std::size_t merges = 0; // every merge removes one active element
};

/// Conforming triangulation of [-1,1]^2 holding the whole bisection
/// genealogy. Element ids are stable across refine/coarsen, so a mesh and
/// any mesh derived from it can be compared element by element.
class Mesh {
public:
    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<Element>& elements() const { return elements_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::span<const ElementId> active() const { return active_; }

    std::size_t num_active() const { return active_.size(); }
    bool is_active(ElementId id) const {
        return id < elements_.size() && elements_[id].status == ElementStatus::active;
    }
    /// Position of an active element in active(); this is the DoF block index.
    std::size_t active_index(ElementId id) const;
    /// Edge indices of the three local edges of an active element.
    const std::array<EdgeIndex, 3>& element_edges(ElementId id) const;

    std::array<Point, 3> corners(ElementId id) const;
    double area(ElementId id) const;
    double diameter(ElementId id) const;
    double min_angle(ElementId id) const;

    /// Version stamp incremented by every topology change.
    std::uint64_t generation_counter() const { return generation_counter_; }
    /// Identifies the initial mesh this one descends from.
    std::uint64_t lineage() const { return lineage_; }

private:
    friend Mesh uniform_initial_mesh(int n);
    friend Mesh refine(const Mesh&, std::span<const ElementId>, RefineStats*);
    friend Mesh coarsen(const Mesh&, std::span<const ElementId>, CoarsenStats*);

    void rebuild_topology();
    VertexId midpoint(VertexId a, VertexId b);
    void bisect(ElementId id);

    std::vector<Point> vertices_;
    std::vector<Element> elements_;
    std::vector<Edge> edges_;
    std::vector<ElementId> active_;
    std::vector<std::uint32_t> active_index_;
    std::vector<std::array<EdgeIndex, 3>> element_edges_;
    std::map<std::pair<VertexId, VertexId>, VertexId> midpoints_;
    std::uint64_t generation_counter_ = 0;
    std::uint64_t lineage_ = 0;
};

/// (2n)^2 squares on [-1,1]^2, each cut along its (x0,y0)-(x1,y1) diagonal.
/// The hypotenuse is every triangle's refinement edge.
Mesh uniform_initial_mesh(int n);

/// Newest vertex bisection of the marked elements plus conforming closure.
Mesh refine(const Mesh& mesh, std::span<const ElementId> marked, RefineStats* stats = nullptr);

/// Merges sibling pairs back into their parents where every element around
/// the removed midpoint is marked and the result stays conforming.
/// Ineligible marks are skipped.
Mesh coarsen(const Mesh& mesh, std::span<const ElementId> marked, CoarsenStats* stats = nullptr);

/// Checks conformity, edge/normal consistency and positive orientation.
/// Returns an empty string when the mesh is sound, otherwise a description.
std::string check_mesh(const Mesh& mesh);

double total_active_area(const Mesh& mesh);
double min_active_angle(const Mesh& mesh);

} // namespace advac
