#include "berkgreen/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

namespace berkgreen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_offset(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

}  // namespace

std::string_view to_string(PointType type) {
    switch (type) {
        case PointType::I: return "I";
        case PointType::II: return "II";
        case PointType::III: return "III";
    }
    return "?";
}

PointType parse_point_type(std::string_view text) {
    if (text == "I") return PointType::I;
    if (text == "II") return PointType::II;
    if (text == "III") return PointType::III;
    throw InputError("unknown point type '" + std::string(text) + "' (expected I, II or III)");
}

// ---------------------------------------------------------------------------
// MetricGraph

MetricGraph::MetricGraph(std::vector<Vertex> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
    if (vertices_.empty()) throw StructuralError("metric graph has no vertices");

    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        if (!vertex_ids_.emplace(vertices_[i].id, static_cast<int>(i)).second)
            throw InputError("duplicate vertex id '" + vertices_[i].id + "'");
    }
    incident_.assign(vertices_.size(), {});
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        if (!edge_ids_.emplace(e.id, static_cast<int>(i)).second)
            throw InputError("duplicate edge id '" + e.id + "'");
        const int n = static_cast<int>(vertices_.size());
        if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
            throw InputError("edge '" + e.id + "' references a missing vertex");
        if (e.u == e.v) throw StructuralError("edge '" + e.id + "' is a loop edge; subdivide it first");
        if (!(e.length > 0.0) || !std::isfinite(e.length))
            throw InputError("edge '" + e.id + "' must have a positive finite length");
        incident_[static_cast<std::size_t>(e.u)].push_back(static_cast<int>(i));
        incident_[static_cast<std::size_t>(e.v)].push_back(static_cast<int>(i));
    }

    // all-pairs shortest paths, one Dijkstra per source
    const std::size_t n = vertices_.size();
    dist_.assign(n * n, kInf);
    using Item = std::pair<double, int>;
    for (std::size_t s = 0; s < n; ++s) {
        double* d = dist_.data() + s * n;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
        d[s] = 0.0;
        queue.emplace(0.0, static_cast<int>(s));
        while (!queue.empty()) {
            auto [du, u] = queue.top();
            queue.pop();
            if (du > d[u]) continue;
            for (int ei : incident_[static_cast<std::size_t>(u)]) {
                const Edge& e = edges_[static_cast<std::size_t>(ei)];
                const int w = e.u == u ? e.v : e.u;
                if (du + e.length < d[w]) {
                    d[w] = du + e.length;
                    queue.emplace(d[w], w);
                }
            }
        }
        for (std::size_t t = 0; t < n; ++t) {
            if (d[t] == kInf) {
                throw StructuralError("metric graph is not connected: no path from '" + vertices_[s].id +
                                      "' to '" + vertices_[t].id + "'");
            }
        }
    }
}

std::optional<int> MetricGraph::find_vertex(std::string_view id) const {
    auto it = vertex_ids_.find(id);
    if (it == vertex_ids_.end()) return std::nullopt;
    return it->second;
}

std::optional<int> MetricGraph::find_edge(std::string_view id) const {
    auto it = edge_ids_.find(id);
    if (it == edge_ids_.end()) return std::nullopt;
    return it->second;
}

int MetricGraph::vertex_index(std::string_view id) const {
    if (auto v = find_vertex(id)) return *v;
    throw InputError("unknown vertex id '" + std::string(id) + "'");
}

int MetricGraph::edge_index(std::string_view id) const {
    if (auto e = find_edge(id)) return *e;
    throw InputError("unknown edge id '" + std::string(id) + "'");
}

SpacePoint MetricGraph::point(int edge, double offset) const {
    if (edge < 0 || static_cast<std::size_t>(edge) >= edges_.size())
        throw InputError("edge index " + std::to_string(edge) + " out of range");
    const Edge& e = edges_[static_cast<std::size_t>(edge)];
    if (!(offset >= 0.0 && offset <= e.length))
        throw InputError("offset " + format_offset(offset) + " outside edge '" + e.id + "' of length " +
                         format_offset(e.length));
    if (offset == 0.0) return SpacePoint::at_vertex(e.u);
    if (offset == e.length) return SpacePoint::at_vertex(e.v);
    return SpacePoint::raw_edge_point(edge, offset);
}

bool MetricGraph::contains(const SpacePoint& p) const {
    if (p.is_vertex()) return p.vertex() >= 0 && static_cast<std::size_t>(p.vertex()) < vertices_.size();
    if (p.edge() < 0 || static_cast<std::size_t>(p.edge()) >= edges_.size()) return false;
    return p.offset() > 0.0 && p.offset() < edges_[static_cast<std::size_t>(p.edge())].length;
}

void MetricGraph::validate(const SpacePoint& p) const {
    if (!contains(p)) throw InputError("invalid point location (vertex " + std::to_string(p.vertex()) + ", edge " +
                                       std::to_string(p.edge()) + ", offset " + format_offset(p.offset()) + ")");
}

PointType MetricGraph::type_of(const SpacePoint& p) const {
    validate(p);
    return p.is_vertex() ? vertices_[static_cast<std::size_t>(p.vertex())].type : PointType::III;
}

std::string MetricGraph::describe(const SpacePoint& p) const {
    if (!contains(p)) return "<invalid point>";
    if (p.is_vertex()) return vertices_[static_cast<std::size_t>(p.vertex())].id;
    return edges_[static_cast<std::size_t>(p.edge())].id + "@" + format_offset(p.offset());
}

double MetricGraph::distance_to_vertex(const SpacePoint& x, int v) const {
    validate(x);
    if (x.is_vertex()) return vertex_distance(x.vertex(), v);
    const Edge& e = edges_[static_cast<std::size_t>(x.edge())];
    return std::min(x.offset() + vertex_distance(e.u, v), e.length - x.offset() + vertex_distance(e.v, v));
}

double MetricGraph::distance(const SpacePoint& x, const SpacePoint& y) const {
    validate(x);
    validate(y);
    if (x == y) return 0.0;
    if (y.is_vertex()) return distance_to_vertex(x, y.vertex());
    if (x.is_vertex()) return distance_to_vertex(y, x.vertex());
    const Edge& f = edges_[static_cast<std::size_t>(y.edge())];
    double best = std::min(y.offset() + distance_to_vertex(x, f.u), f.length - y.offset() + distance_to_vertex(x, f.v));
    if (x.edge() == y.edge()) best = std::min(best, std::abs(x.offset() - y.offset()));
    return best;
}

PathMetricResult MetricGraph::geodesic(const SpacePoint& x, const SpacePoint& y) const {
    validate(x);
    validate(y);
    PathMetricResult result;
    if (x == y) {
        result.path = {x};
        return result;
    }

    // Dijkstra from x over vertices, tracking predecessors. pred_edge = -2 marks
    // a vertex reached directly from x along x's own edge.
    const std::size_t n = vertices_.size();
    std::vector<double> d(n, kInf);
    std::vector<int> pred_edge(n, -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    if (x.is_vertex()) {
        d[static_cast<std::size_t>(x.vertex())] = 0.0;
        queue.emplace(0.0, x.vertex());
    } else {
        const Edge& e = edges_[static_cast<std::size_t>(x.edge())];
        d[static_cast<std::size_t>(e.u)] = x.offset();
        d[static_cast<std::size_t>(e.v)] = std::min(d[static_cast<std::size_t>(e.v)], e.length - x.offset());
        pred_edge[static_cast<std::size_t>(e.u)] = -2;
        pred_edge[static_cast<std::size_t>(e.v)] = -2;
        queue.emplace(d[static_cast<std::size_t>(e.u)], e.u);
        queue.emplace(d[static_cast<std::size_t>(e.v)], e.v);
    }
    while (!queue.empty()) {
        auto [du, u] = queue.top();
        queue.pop();
        if (du > d[static_cast<std::size_t>(u)]) continue;
        for (int ei : incident_[static_cast<std::size_t>(u)]) {
            const Edge& e = edges_[static_cast<std::size_t>(ei)];
            const int w = e.u == u ? e.v : e.u;
            if (du + e.length < d[static_cast<std::size_t>(w)]) {
                d[static_cast<std::size_t>(w)] = du + e.length;
                pred_edge[static_cast<std::size_t>(w)] = ei;
                queue.emplace(du + e.length, w);
            }
        }
    }

    // choose how to reach y: direct along a shared edge, or via one of y's endpoints
    int last_vertex = -1;
    int last_edge = -1;
    bool direct = false;
    double best = kInf;
    if (y.is_vertex()) {
        last_vertex = y.vertex();
        best = d[static_cast<std::size_t>(last_vertex)];
    } else {
        const Edge& f = edges_[static_cast<std::size_t>(y.edge())];
        if (!x.is_vertex() && x.edge() == y.edge()) {
            best = std::abs(x.offset() - y.offset());
            direct = true;
        }
        const double via_u = d[static_cast<std::size_t>(f.u)] + y.offset();
        const double via_v = d[static_cast<std::size_t>(f.v)] + f.length - y.offset();
        if (via_u < best) {
            best = via_u;
            direct = false;
            last_vertex = f.u;
        }
        if (via_v < best) {
            best = via_v;
            direct = false;
            last_vertex = f.v;
        }
        last_edge = y.edge();
    }
    result.distance = best;
    std::vector<SpacePoint> rev{y};
    std::vector<int> rev_edges;
    if (direct) {
        rev_edges.push_back(x.is_vertex() ? -1 : x.edge());
    } else {
        if (last_edge >= 0) {
            rev.push_back(SpacePoint::at_vertex(last_vertex));
            rev_edges.push_back(last_edge);
        }
        int v = last_vertex;
        while (true) {
            if (x.is_vertex() && v == x.vertex()) break;
            const int pe = pred_edge[static_cast<std::size_t>(v)];
            if (pe == -2) {
                rev_edges.push_back(x.edge());
                break;
            }
            const Edge& e = edges_[static_cast<std::size_t>(pe)];
            v = e.u == v ? e.v : e.u;
            rev.push_back(SpacePoint::at_vertex(v));
            rev_edges.push_back(pe);
        }
    }
    if (rev.back() != x) rev.push_back(x);
    result.path.assign(rev.rbegin(), rev.rend());
    result.edges.assign(rev_edges.rbegin(), rev_edges.rend());
    return result;
}

double MetricGraph::total_length() const {
    double total = 0.0;
    for (const Edge& e : edges_) total += e.length;
    return total;
}

double MetricGraph::diameter() const {
    double best = 0.0;
    const int n = static_cast<int>(vertices_.size());
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) best = std::max(best, vertex_distance(a, b));
    for (std::size_t ei = 0; ei < edges_.size(); ++ei) {
        const Edge& e = edges_[ei];
        // vertex to interior point of e: the max of a tent is at its apex
        for (int a = 0; a < n; ++a)
            best = std::max(best, 0.5 * (e.length + vertex_distance(a, e.u) + vertex_distance(a, e.v)));
        // two points on the same edge: half the shortest cycle through e
        best = std::max(best, 0.5 * (e.length + vertex_distance(e.u, e.v)));
        for (std::size_t fi = 0; fi < edges_.size(); ++fi) {
            if (fi == ei) continue;
            const Edge& f = edges_[fi];
            // max over s is (len_e + A(t) + B(t)) / 2, with A + B concave in t
            std::vector<double> ts{0.0, f.length};
            for (int end : {e.u, e.v}) {
                const double t = 0.5 * (f.length + vertex_distance(end, f.v) - vertex_distance(end, f.u));
                if (t > 0.0 && t < f.length) ts.push_back(t);
            }
            for (double t : ts) {
                auto to = [&](int end) {
                    return std::min(t + vertex_distance(end, f.u), f.length - t + vertex_distance(end, f.v));
                };
                best = std::max(best, 0.5 * (e.length + to(e.u) + to(e.v)));
            }
        }
    }
    return best;
}

std::vector<SpacePoint> MetricGraph::mesh(double h, bool include_type_one) const {
    if (!(h > 0.0)) throw InputError("mesh spacing h must be positive");
    std::vector<SpacePoint> points;
    for (std::size_t v = 0; v < vertices_.size(); ++v) {
        if (!include_type_one && vertices_[v].type == PointType::I) continue;
        points.push_back(SpacePoint::at_vertex(static_cast<int>(v)));
    }
    for (std::size_t ei = 0; ei < edges_.size(); ++ei) {
        const double len = edges_[ei].length;
        const auto cells = static_cast<long>(std::ceil(len / h - 1e-12));
        for (long k = 1; k < cells; ++k)
            points.push_back(SpacePoint::raw_edge_point(static_cast<int>(ei), len * static_cast<double>(k) / static_cast<double>(cells)));
    }
    return points;
}

// ---------------------------------------------------------------------------
// GraphRefinement

GraphRefinement::GraphRefinement(std::shared_ptr<const MetricGraph> original, std::span<const SpacePoint> points)
    : original_(std::move(original)) {
    const MetricGraph& g = *original_;
    cuts_.assign(g.edge_count(), {});
    for (const SpacePoint& p : points) {
        g.validate(p);
        if (!p.is_vertex()) cuts_[static_cast<std::size_t>(p.edge())].push_back(p.offset());
    }
    std::set<std::string> used;
    for (const auto& v : g.vertices()) used.insert(v.id);
    for (const auto& e : g.edges()) used.insert(e.id);
    auto fresh = [&](std::string base) {
        while (used.count(base)) base += "'";
        used.insert(base);
        return base;
    };

    std::vector<MetricGraph::Vertex> vertices = g.vertices();
    std::vector<MetricGraph::Edge> edges;
    pieces_.assign(g.edge_count(), {});
    for (std::size_t ei = 0; ei < g.edge_count(); ++ei) {
        auto& cuts = cuts_[ei];
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        const auto& e = g.edge(static_cast<int>(ei));
        if (cuts.empty()) {
            pieces_[ei].push_back(static_cast<int>(edges.size()));
            edges.push_back(e);
            origin_edge_.push_back(static_cast<int>(ei));
            continue;
        }
        int prev = e.u;
        double prev_offset = 0.0;
        for (std::size_t k = 0; k <= cuts.size(); ++k) {
            int next;
            double next_offset;
            if (k < cuts.size()) {
                next = static_cast<int>(vertices.size());
                vertices.push_back({fresh(e.id + "#" + std::to_string(k + 1)), PointType::III});
                next_offset = cuts[k];
            } else {
                next = e.v;
                next_offset = e.length;
            }
            // the last piece absorbs rounding so lengths sum to the original exactly
            const double len = k < cuts.size() ? next_offset - prev_offset : e.length - prev_offset;
            pieces_[ei].push_back(static_cast<int>(edges.size()));
            edges.push_back({fresh(e.id + "." + std::to_string(k)), prev, next, len});
            origin_edge_.push_back(static_cast<int>(ei));
            prev = next;
            prev_offset = next_offset;
        }
    }
    refined_ = std::make_shared<const MetricGraph>(std::move(vertices), std::move(edges));
}

SpacePoint GraphRefinement::map(const SpacePoint& original) const {
    original_->validate(original);
    if (original.is_vertex()) return original;
    const auto ei = static_cast<std::size_t>(original.edge());
    const auto& cuts = cuts_[ei];
    const auto& pieces = pieces_[ei];
    const double s = original.offset();
    auto it = std::lower_bound(cuts.begin(), cuts.end(), s);
    if (it != cuts.end() && *it == s) {
        const int piece = pieces[static_cast<std::size_t>(it - cuts.begin())];
        return SpacePoint::at_vertex(refined_->edge(piece).v);
    }
    const auto k = static_cast<std::size_t>(it - cuts.begin());
    const double start = k == 0 ? 0.0 : cuts[k - 1];
    const int piece = pieces[k];
    const double local = std::min(s - start, refined_->edge(piece).length);
    return refined_->point(piece, local);
}

// ---------------------------------------------------------------------------
// MetricSpace

struct MetricSpace::State {
    SpaceDescription description;
    std::shared_ptr<const MetricGraph> graph;
    std::vector<int> vertex_component;
    std::vector<int> edge_component;
    std::vector<int> attach;
};

namespace {

std::shared_ptr<const MetricGraph> flatten(const SpaceDescription& d, std::vector<int>& vertex_component,
                                           std::vector<int>& edge_component, std::vector<int>& attach) {
    std::vector<MetricGraph::Vertex> vertices;
    std::map<std::string, int, std::less<>> index;
    for (const auto& v : d.vertices) {
        if (v.type == PointType::I)
            throw InputError("skeleton vertex '" + v.id + "' cannot be of type I");
        if (!index.emplace(v.id, static_cast<int>(vertices.size())).second)
            throw InputError("duplicate vertex id '" + v.id + "'");
        vertices.push_back({v.id, v.type});
        vertex_component.push_back(MetricSpace::kSkeleton);
    }
    const std::size_t skeleton_vertices = vertices.size();
    std::vector<MetricGraph::Edge> edges;
    auto lookup = [&](const std::string& id, const std::string& edge_id) {
        auto it = index.find(id);
        if (it == index.end()) throw InputError("edge '" + edge_id + "' references unknown vertex '" + id + "'");
        return it->second;
    };
    for (const auto& e : d.edges) {
        edges.push_back({e.id, lookup(e.u, e.id), lookup(e.v, e.id), e.length});
        edge_component.push_back(MetricSpace::kSkeleton);
    }
    // validate the skeleton on its own so connectivity errors name the skeleton
    {
        std::vector<MetricGraph::Vertex> sv(vertices.begin(), vertices.end());
        MetricGraph skeleton(std::move(sv), edges);
    }

    for (std::size_t t = 0; t < d.trees.size(); ++t) {
        const auto& tree = d.trees[t];
        const std::string tag = "tree " + std::to_string(t) + " (attach '" + tree.attach + "')";
        auto root = index.find(tree.attach);
        if (root == index.end() || static_cast<std::size_t>(root->second) >= skeleton_vertices)
            throw InputError(tag + ": attach point is not a skeleton vertex");
        attach.push_back(root->second);
        std::map<std::string, int, std::less<>> local;  // id -> position in tree (root = 0)
        local.emplace(tree.attach, 0);
        for (const auto& v : tree.vertices) {
            if (!index.emplace(v.id, static_cast<int>(vertices.size())).second)
                throw InputError(tag + ": duplicate vertex id '" + v.id + "'");
            local.emplace(v.id, static_cast<int>(local.size()));
            PointType type = v.type;
            if (auto lt = tree.leaf_types.find(v.id); lt != tree.leaf_types.end()) type = lt->second;
            vertices.push_back({v.id, type});
            vertex_component.push_back(static_cast<int>(t));
        }
        for (const auto& [id, type] : tree.leaf_types) {
            if (!local.count(id) || id == tree.attach)
                throw InputError(tag + ": leaf_types names '" + id + "', which is not a vertex of the tree");
        }
        // union-find for acyclicity and connectivity
        std::vector<int> parent(local.size());
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int a) {
            while (parent[static_cast<std::size_t>(a)] != a) a = parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            return a;
        };
        std::vector<int> tree_degree(local.size(), 0);
        for (const auto& e : tree.edges) {
            auto a = local.find(e.u);
            auto b = local.find(e.v);
            if (a == local.end() || b == local.end())
                throw InputError(tag + ": edge '" + e.id + "' references a vertex outside the tree");
            if (a->second == b->second) throw StructuralError(tag + ": edge '" + e.id + "' is a loop edge");
            const int ra = find(a->second);
            const int rb = find(b->second);
            if (ra == rb) throw StructuralError(tag + ": edge '" + e.id + "' closes a cycle; hanging trees must be acyclic");
            parent[static_cast<std::size_t>(ra)] = rb;
            ++tree_degree[static_cast<std::size_t>(a->second)];
            ++tree_degree[static_cast<std::size_t>(b->second)];
            edges.push_back({e.id, index.at(e.u), index.at(e.v), e.length});
            edge_component.push_back(static_cast<int>(t));
        }
        if (tree.edges.size() + 1 != local.size())
            throw StructuralError(tag + ": tree is not connected to its attach point");
        for (const auto& v : tree.vertices) {
            const int pos = local.at(v.id);
            const PointType type = vertices[static_cast<std::size_t>(index.at(v.id))].type;
            if (type == PointType::I && tree_degree[static_cast<std::size_t>(pos)] != 1)
                throw InputError(tag + ": type-I vertex '" + v.id + "' must be a leaf");
        }
    }
    return std::make_shared<const MetricGraph>(std::move(vertices), std::move(edges));
}

}  // namespace

MetricSpace::MetricSpace(SpaceDescription description) {
    auto state = std::make_shared<State>();
    state->graph = flatten(description, state->vertex_component, state->edge_component, state->attach);
    state->description = std::move(description);
    state_ = std::move(state);
}

const SpaceDescription& MetricSpace::description() const { return state_->description; }
const MetricGraph& MetricSpace::graph() const { return *state_->graph; }
std::shared_ptr<const MetricGraph> MetricSpace::graph_ptr() const { return state_->graph; }
std::size_t MetricSpace::tree_count() const { return state_->attach.size(); }
int MetricSpace::vertex_component(int v) const { return state_->vertex_component.at(static_cast<std::size_t>(v)); }
int MetricSpace::edge_component(int e) const { return state_->edge_component.at(static_cast<std::size_t>(e)); }
int MetricSpace::tree_attach(int tree) const { return state_->attach.at(static_cast<std::size_t>(tree)); }

int MetricSpace::component(const SpacePoint& p) const {
    graph().validate(p);
    return p.is_vertex() ? vertex_component(p.vertex()) : edge_component(p.edge());
}

SpacePoint MetricSpace::retract(const SpacePoint& x) const {
    const int c = component(x);
    if (c == kSkeleton) return x;
    return SpacePoint::at_vertex(tree_attach(c));
}

SpacePoint MetricSpace::meet(const SpacePoint& zeta, const SpacePoint& x, const SpacePoint& y) const {
    const SpacePoint root = retract(zeta);
    if (retract(x) != root || retract(y) != root) {
        throw DomainError("meet: points " + graph().describe(zeta) + ", " + graph().describe(x) + ", " +
                          graph().describe(y) + " do not lie in one uniquely path-connected fiber");
    }
    if (x == y) return x;
    // Inside a fiber (a tree) geodesics are unique, so the meet is the end of
    // the common prefix of the two paths leaving zeta.
    const PathMetricResult px = geodesic(zeta, x);
    const PathMetricResult py = geodesic(zeta, y);
    std::size_t k = 0;
    while (k + 1 < px.path.size() && k + 1 < py.path.size() && px.path[k + 1] == py.path[k + 1]) ++k;
    const SpacePoint& common = px.path[k];
    if (k + 1 >= px.path.size()) return common;
    if (k + 1 >= py.path.size()) return common;
    // both continue along the same edge: the nearer of the next breakpoints is the meet
    if (px.edges[k] >= 0 && px.edges[k] == py.edges[k]) {
        const SpacePoint& nx = px.path[k + 1];
        const SpacePoint& ny = py.path[k + 1];
        return graph().distance(common, nx) <= graph().distance(common, ny) ? nx : ny;
    }
    return common;
}

SpaceRefinement MetricSpace::refine(std::span<const SpacePoint> points) const {
    GraphRefinement gr(graph_ptr(), points);
    const MetricGraph& rg = gr.graph();
    const MetricGraph& og = graph();
    SpaceDescription d;
    d.trees.resize(tree_count());
    for (std::size_t t = 0; t < tree_count(); ++t) {
        d.trees[t].attach = description().trees[t].attach;
        d.trees[t].leaf_types = description().trees[t].leaf_types;
    }
    // original vertices keep their component; new vertices follow their edge
    std::vector<int> rcomp(rg.vertex_count(), kSkeleton);
    for (std::size_t v = 0; v < og.vertex_count(); ++v) rcomp[v] = vertex_component(static_cast<int>(v));
    for (std::size_t e = 0; e < rg.edge_count(); ++e) {
        const auto& re = rg.edge(static_cast<int>(e));
        const int c = edge_component(gr.origin_edge(static_cast<int>(e)));
        for (int end : {re.u, re.v})
            if (static_cast<std::size_t>(end) >= og.vertex_count()) rcomp[static_cast<std::size_t>(end)] = c;
    }
    // tree vertex records keep their declared type; leaf_types is reapplied on rebuild
    std::map<std::string, PointType> declared;
    for (const auto& tree : description().trees)
        for (const auto& rec : tree.vertices) declared.emplace(rec.id, rec.type);
    for (std::size_t v = 0; v < rg.vertex_count(); ++v) {
        const auto& rv = rg.vertex(static_cast<int>(v));
        VertexRecord rec{rv.id, rv.type};
        const int c = rcomp[v];
        if (c == kSkeleton) {
            d.vertices.push_back(rec);
        } else {
            if (auto it = declared.find(rv.id); it != declared.end()) rec.type = it->second;
            d.trees[static_cast<std::size_t>(c)].vertices.push_back(rec);
        }
    }
    for (std::size_t e = 0; e < rg.edge_count(); ++e) {
        const auto& re = rg.edge(static_cast<int>(e));
        EdgeRecord rec{re.id, rg.vertex(re.u).id, rg.vertex(re.v).id, re.length};
        const int c = edge_component(gr.origin_edge(static_cast<int>(e)));
        if (c == kSkeleton) d.edges.push_back(rec);
        else d.trees[static_cast<std::size_t>(c)].edges.push_back(rec);
    }
    return SpaceRefinement(MetricSpace(std::move(d)), std::move(gr));
}

SpacePoint SpaceRefinement::map(const SpacePoint& original) const {
    // translate through ids: the rebuilt space may order vertices differently
    const SpacePoint p = graph_map_.map(original);
    const MetricGraph& from = graph_map_.graph();
    const MetricGraph& to = space_.graph();
    if (p.is_vertex()) return SpacePoint::at_vertex(to.vertex_index(from.vertex(p.vertex()).id));
    return to.point(to.edge_index(from.edge(p.edge()).id), p.offset());
}

}  // namespace berkgreen
