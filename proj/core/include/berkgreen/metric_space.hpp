#pragma once

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace berkgreen {

/// Malformed or out-of-range caller input (bad ids, offsets, options).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input that is well-formed but outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Graph-shape violations: disconnected graphs, loop edges, cycles in hanging trees.
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Point types of the modeled analytic curve. Type I points are the rational
/// points; they only ever appear as leaves of hanging trees.
enum class PointType { I, II, III };

std::string_view to_string(PointType type);
PointType parse_point_type(std::string_view text);

/// A location on a metric graph: either a vertex or (edge, offset from the
/// edge's first endpoint). Obtain points through MetricGraph::point so that
/// offsets 0 and length collapse onto the endpoint vertices.
class SpacePoint {
public:
    SpacePoint() = default;

    static SpacePoint at_vertex(int vertex) { return SpacePoint(vertex, -1, 0.0); }
    static SpacePoint raw_edge_point(int edge, double offset) { return SpacePoint(-1, edge, offset); }

    bool is_vertex() const { return edge_ < 0; }
    int vertex() const { return vertex_; }
    int edge() const { return edge_; }
    double offset() const { return offset_; }

    friend bool operator==(const SpacePoint&, const SpacePoint&) = default;
    friend auto operator<=>(const SpacePoint&, const SpacePoint&) = default;

private:
    SpacePoint(int vertex, int edge, double offset) : vertex_(vertex), edge_(edge), offset_(offset) {}

    int vertex_ = 0;
    int edge_ = -1;
    double offset_ = 0.0;
};

struct PathMetricResult {
    double distance = 0.0;
    /// Breakpoints of the geodesic, starting at the source and ending at the target.
    std::vector<SpacePoint> path;
    /// edges[i] is the edge traversed from path[i] to path[i + 1].
    std::vector<int> edges;
};

/// A finite connected metric graph without loop edges. Parallel edges are allowed.
/// Immutable after construction; all-pairs vertex distances are precomputed.
class MetricGraph {
public:
    struct Vertex {
        std::string id;
        PointType type = PointType::II;
    };
    struct Edge {
        std::string id;
        int u = 0;
        int v = 0;
        double length = 0.0;
    };

    MetricGraph(std::vector<Vertex> vertices, std::vector<Edge> edges);

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const Vertex& vertex(int v) const { return vertices_.at(static_cast<std::size_t>(v)); }
    const Edge& edge(int e) const { return edges_.at(static_cast<std::size_t>(e)); }
    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::span<const int> incident_edges(int v) const { return incident_.at(static_cast<std::size_t>(v)); }
    int degree(int v) const { return static_cast<int>(incident_edges(v).size()); }

    std::optional<int> find_vertex(std::string_view id) const;
    std::optional<int> find_edge(std::string_view id) const;
    int vertex_index(std::string_view id) const;
    int edge_index(std::string_view id) const;

    /// Canonical point on an edge; offsets 0 and length map to the endpoints.
    SpacePoint point(int edge, double offset) const;
    SpacePoint point(std::string_view edge_id, double offset) const { return point(edge_index(edge_id), offset); }
    SpacePoint vertex_point(std::string_view id) const { return SpacePoint::at_vertex(vertex_index(id)); }

    /// Throws InputError unless `p` is a canonical point of this graph.
    void validate(const SpacePoint& p) const;
    bool contains(const SpacePoint& p) const;
    PointType type_of(const SpacePoint& p) const;
    std::string describe(const SpacePoint& p) const;

    double vertex_distance(int a, int b) const { return dist_[static_cast<std::size_t>(a) * vertices_.size() + static_cast<std::size_t>(b)]; }
    double distance_to_vertex(const SpacePoint& x, int v) const;
    double distance(const SpacePoint& x, const SpacePoint& y) const;
    PathMetricResult geodesic(const SpacePoint& x, const SpacePoint& y) const;

    double total_length() const;
    /// Largest distance between two points, attained at vertices or edge interiors.
    double diameter() const;

    /// All vertices plus ceil(length / h) - 1 equally spaced interior points per
    /// edge, so consecutive points are at most h apart. Type I vertices are
    /// dropped unless `include_type_one` is set.
    std::vector<SpacePoint> mesh(double h, bool include_type_one = false) const;

private:
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> incident_;
    std::map<std::string, int, std::less<>> vertex_ids_;
    std::map<std::string, int, std::less<>> edge_ids_;
    std::vector<double> dist_;
};

/// Result of subdividing a graph: every listed point became a vertex.
class GraphRefinement {
public:
    GraphRefinement(std::shared_ptr<const MetricGraph> original, std::span<const SpacePoint> points);

    const MetricGraph& graph() const { return *refined_; }
    std::shared_ptr<const MetricGraph> graph_ptr() const { return refined_; }
    /// Image of a point of the original graph.
    SpacePoint map(const SpacePoint& original) const;
    /// Original edge that a refined edge was cut from.
    int origin_edge(int refined_edge) const { return origin_edge_.at(static_cast<std::size_t>(refined_edge)); }

private:
    std::shared_ptr<const MetricGraph> original_;
    std::shared_ptr<const MetricGraph> refined_;
    std::vector<std::vector<double>> cuts_;
    std::vector<std::vector<int>> pieces_;
    std::vector<int> origin_edge_;
};

struct VertexRecord {
    std::string id;
    PointType type = PointType::II;
    friend bool operator==(const VertexRecord&, const VertexRecord&) = default;
};

struct EdgeRecord {
    std::string id;
    std::string u;
    std::string v;
    double length = 0.0;
    friend bool operator==(const EdgeRecord&, const EdgeRecord&) = default;
};

/// A tree hanging off a skeleton vertex. Edges may reference `attach`.
struct TreeDescription {
    std::string attach;
    std::vector<VertexRecord> vertices;
    std::vector<EdgeRecord> edges;
    /// Overrides for leaf types, e.g. {"p1": I}.
    std::map<std::string, PointType> leaf_types;
    friend bool operator==(const TreeDescription&, const TreeDescription&) = default;
};

struct SpaceDescription {
    std::vector<VertexRecord> vertices;
    std::vector<EdgeRecord> edges;
    std::vector<TreeDescription> trees;
    friend bool operator==(const SpaceDescription&, const SpaceDescription&) = default;
};

class SpaceRefinement;

/// Skeleton plus hanging trees, flattened into one metric graph. Points and
/// edge/vertex indices always refer to `graph()`. Copies share state.
class MetricSpace {
public:
    static constexpr int kSkeleton = -1;

    explicit MetricSpace(SpaceDescription description);

    const SpaceDescription& description() const;
    const MetricGraph& graph() const;
    std::shared_ptr<const MetricGraph> graph_ptr() const;

    std::size_t tree_count() const;
    /// kSkeleton for skeleton vertices (including attach vertices), else the tree index.
    int vertex_component(int v) const;
    int edge_component(int e) const;
    int component(const SpacePoint& p) const;
    bool on_skeleton(const SpacePoint& p) const { return component(p) == kSkeleton; }
    int tree_attach(int tree) const;

    SpacePoint point(std::string_view vertex_id) const { return graph().vertex_point(vertex_id); }
    SpacePoint point(std::string_view edge_id, double offset) const { return graph().point(edge_id, offset); }
    PointType type(const SpacePoint& p) const { return graph().type_of(p); }

    double rho(const SpacePoint& x, const SpacePoint& y) const { return graph().distance(x, y); }
    PathMetricResult geodesic(const SpacePoint& x, const SpacePoint& y) const { return graph().geodesic(x, y); }

    /// Collapses each hanging tree onto its attach vertex.
    SpacePoint retract(const SpacePoint& x) const;

    /// First meeting point of the paths [x, zeta] and [y, zeta]. All three points
    /// must lie in the fiber of one skeleton point; otherwise DomainError.
    SpacePoint meet(const SpacePoint& zeta, const SpacePoint& x, const SpacePoint& y) const;

    /// Equal-as-a-set space in which every listed point is a vertex.
    SpaceRefinement refine(std::span<const SpacePoint> points) const;

    std::vector<SpacePoint> mesh(double h) const { return graph().mesh(h); }

private:
    struct State;
    std::shared_ptr<const State> state_;
};

class SpaceRefinement {
public:
    SpaceRefinement(MetricSpace space, GraphRefinement graph_map)
        : space_(std::move(space)), graph_map_(std::move(graph_map)) {}

    const MetricSpace& space() const { return space_; }
    SpacePoint map(const SpacePoint& original) const;

private:
    MetricSpace space_;
    GraphRefinement graph_map_;
};

}  // namespace berkgreen
