#include "berkgreen/paf.hpp"

#include <algorithm>
#include <cmath>

namespace berkgreen {

namespace {

constexpr double kLaplacianDrop = 1e-12;

double interpolate(std::span<const Breakpoint> bps, double s) {
    auto it = std::lower_bound(bps.begin(), bps.end(), s,
                               [](const Breakpoint& b, double x) { return b.offset < x; });
    if (it == bps.end()) return bps.back().value;
    if (it->offset == s || it == bps.begin()) return it->value;
    const Breakpoint& hi = *it;
    const Breakpoint& lo = *(it - 1);
    const double t = (s - lo.offset) / (hi.offset - lo.offset);
    return lo.value + t * (hi.value - lo.value);
}

/// Integral of the piecewise-affine `bps` over [a, b].
double integrate_range(std::span<const Breakpoint> bps, double a, double b) {
    double total = 0.0;
    double prev_s = a;
    double prev_v = interpolate(bps, a);
    for (const Breakpoint& bp : bps) {
        if (bp.offset <= a) continue;
        if (bp.offset >= b) break;
        total += 0.5 * (prev_v + bp.value) * (bp.offset - prev_s);
        prev_s = bp.offset;
        prev_v = bp.value;
    }
    total += 0.5 * (prev_v + interpolate(bps, b)) * (b - prev_s);
    return total;
}

}  // namespace

PiecewiseAffineFn::PiecewiseAffineFn(std::shared_ptr<const MetricGraph> graph,
                                     std::vector<std::vector<Breakpoint>> per_edge,
                                     std::vector<double> vertex_values)
    : graph_(std::move(graph)), per_edge_(std::move(per_edge)), vertex_values_(std::move(vertex_values)) {}

PiecewiseAffineFn::PiecewiseAffineFn(std::shared_ptr<const MetricGraph> graph,
                                     std::vector<std::vector<Breakpoint>> per_edge)
    : graph_(std::move(graph)), per_edge_(std::move(per_edge)) {
    const MetricGraph& g = *graph_;
    if (per_edge_.size() != g.edge_count()) throw InputError("piecewise-affine function needs one breakpoint list per edge");
    vertex_values_.assign(g.vertex_count(), 0.0);
    std::vector<bool> seen(g.vertex_count(), false);
    auto check_vertex = [&](int v, double value, const std::string& edge_id) {
        auto idx = static_cast<std::size_t>(v);
        if (!seen[idx]) {
            seen[idx] = true;
            vertex_values_[idx] = value;
        } else if (std::abs(vertex_values_[idx] - value) > 1e-12 * (1.0 + std::abs(value))) {
            throw InputError("piecewise-affine function is discontinuous at vertex '" + g.vertex(v).id +
                             "' (edge '" + edge_id + "')");
        }
    };
    for (std::size_t e = 0; e < per_edge_.size(); ++e) {
        const auto& edge = g.edge(static_cast<int>(e));
        const auto& bps = per_edge_[e];
        if (bps.size() < 2 || bps.front().offset != 0.0 || bps.back().offset != edge.length)
            throw InputError("breakpoints on edge '" + edge.id + "' must start at 0 and end at the edge length");
        for (std::size_t k = 1; k < bps.size(); ++k)
            if (!(bps[k].offset > bps[k - 1].offset))
                throw InputError("breakpoints on edge '" + edge.id + "' must be strictly increasing");
        check_vertex(edge.u, bps.front().value, edge.id);
        check_vertex(edge.v, bps.back().value, edge.id);
    }
}

PiecewiseAffineFn PiecewiseAffineFn::from_vertex_values(std::shared_ptr<const MetricGraph> graph,
                                                        std::span<const double> values) {
    if (values.size() != graph->vertex_count()) throw InputError("need one value per vertex");
    std::vector<std::vector<Breakpoint>> per_edge;
    for (const auto& e : graph->edges())
        per_edge.push_back({{0.0, values[static_cast<std::size_t>(e.u)]}, {e.length, values[static_cast<std::size_t>(e.v)]}});
    return PiecewiseAffineFn(std::move(graph), std::move(per_edge), std::vector<double>(values.begin(), values.end()));
}

PiecewiseAffineFn PiecewiseAffineFn::constant(std::shared_ptr<const MetricGraph> graph, double c) {
    std::vector<double> values(graph->vertex_count(), c);
    return from_vertex_values(std::move(graph), values);
}

PiecewiseAffineFn PiecewiseAffineFn::sample(std::shared_ptr<const MetricGraph> graph,
                                            const std::function<double(const SpacePoint&)>& f,
                                            const std::vector<std::vector<double>>& breaks) {
    const MetricGraph& g = *graph;
    std::vector<double> vertex_values(g.vertex_count());
    for (std::size_t v = 0; v < g.vertex_count(); ++v) vertex_values[v] = f(SpacePoint::at_vertex(static_cast<int>(v)));
    std::vector<std::vector<Breakpoint>> per_edge(g.edge_count());
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const auto& edge = g.edge(static_cast<int>(e));
        std::vector<double> offsets;
        if (e < breaks.size())
            for (double s : breaks[e])
                if (s > 0.0 && s < edge.length) offsets.push_back(s);
        std::sort(offsets.begin(), offsets.end());
        offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
        per_edge[e].push_back({0.0, vertex_values[static_cast<std::size_t>(edge.u)]});
        for (double s : offsets) per_edge[e].push_back({s, f(SpacePoint::raw_edge_point(static_cast<int>(e), s))});
        per_edge[e].push_back({edge.length, vertex_values[static_cast<std::size_t>(edge.v)]});
    }
    return PiecewiseAffineFn(std::move(graph), std::move(per_edge), std::move(vertex_values));
}

double PiecewiseAffineFn::operator()(const SpacePoint& x) const {
    graph_->validate(x);
    if (x.is_vertex()) return vertex_value(x.vertex());
    return interpolate(per_edge_[static_cast<std::size_t>(x.edge())], x.offset());
}

double PiecewiseAffineFn::outgoing_slope(const SpacePoint& x, int edge, Direction dir) const {
    graph_->validate(x);
    if (edge < 0 || static_cast<std::size_t>(edge) >= graph_->edge_count()) throw InputError("direction edge out of range");
    const auto& e = graph_->edge(edge);
    double s;
    if (x.is_vertex()) {
        if (x.vertex() == e.u && dir == Direction::Forward) s = 0.0;
        else if (x.vertex() == e.v && dir == Direction::Backward) s = e.length;
        else throw InputError("direction along edge '" + e.id + "' is not outgoing from " + graph_->describe(x));
    } else {
        if (x.edge() != edge) throw InputError("edge '" + e.id + "' is not incident to " + graph_->describe(x));
        s = x.offset();
    }
    const auto& bps = per_edge_[static_cast<std::size_t>(edge)];
    if (dir == Direction::Forward) {
        auto it = std::upper_bound(bps.begin(), bps.end(), s, [](double v, const Breakpoint& b) { return v < b.offset; });
        const Breakpoint& hi = *it;
        const Breakpoint& lo = *(it - 1);
        return (hi.value - lo.value) / (hi.offset - lo.offset);
    }
    auto it = std::lower_bound(bps.begin(), bps.end(), s, [](const Breakpoint& b, double v) { return b.offset < v; });
    const Breakpoint& hi = *it;
    const Breakpoint& lo = *(it - 1);
    return -(hi.value - lo.value) / (hi.offset - lo.offset);
}

double PiecewiseAffineFn::max_abs_slope() const {
    double m = 0.0;
    for (const auto& bps : per_edge_)
        for (std::size_t k = 1; k < bps.size(); ++k)
            m = std::max(m, std::abs((bps[k].value - bps[k - 1].value) / (bps[k].offset - bps[k - 1].offset)));
    return m;
}

PiecewiseAffineFn PiecewiseAffineFn::combine(double a, const PiecewiseAffineFn& f, double b, const PiecewiseAffineFn& g) {
    if (f.graph_ != g.graph_) throw InputError("combine: functions live on different graphs");
    std::vector<std::vector<Breakpoint>> per_edge(f.per_edge_.size());
    for (std::size_t e = 0; e < per_edge.size(); ++e) {
        std::vector<double> offsets;
        for (const auto& bp : f.per_edge_[e]) offsets.push_back(bp.offset);
        for (const auto& bp : g.per_edge_[e]) offsets.push_back(bp.offset);
        std::sort(offsets.begin(), offsets.end());
        offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
        for (double s : offsets)
            per_edge[e].push_back({s, a * interpolate(f.per_edge_[e], s) + b * interpolate(g.per_edge_[e], s)});
    }
    std::vector<double> vertex_values(f.vertex_values_.size());
    for (std::size_t v = 0; v < vertex_values.size(); ++v)
        vertex_values[v] = a * f.vertex_values_[v] + b * g.vertex_values_[v];
    return PiecewiseAffineFn(f.graph_, std::move(per_edge), std::move(vertex_values));
}

LaplacianMeasure laplacian(const PiecewiseAffineFn& f) {
    const MetricGraph& g = f.graph();
    std::vector<Atom> atoms;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        double sum = 0.0;
        for (int e : g.incident_edges(static_cast<int>(v))) {
            const auto bps = f.breakpoints(e);
            if (g.edge(e).u == static_cast<int>(v))
                sum += (bps[1].value - bps[0].value) / (bps[1].offset - bps[0].offset);
            else {
                const std::size_t n = bps.size();
                sum += (bps[n - 2].value - bps[n - 1].value) / (bps[n - 1].offset - bps[n - 2].offset);
            }
        }
        if (std::abs(sum) >= kLaplacianDrop) atoms.push_back({SpacePoint::at_vertex(static_cast<int>(v)), sum});
    }
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const auto bps = f.breakpoints(static_cast<int>(e));
        for (std::size_t k = 1; k + 1 < bps.size(); ++k) {
            const double left = (bps[k].value - bps[k - 1].value) / (bps[k].offset - bps[k - 1].offset);
            const double right = (bps[k + 1].value - bps[k].value) / (bps[k + 1].offset - bps[k].offset);
            const double sum = right - left;
            if (std::abs(sum) >= kLaplacianDrop)
                atoms.push_back({SpacePoint::raw_edge_point(static_cast<int>(e), bps[k].offset), sum});
        }
    }
    return SignedMeasure(std::move(atoms));
}

double pair(const PiecewiseAffineFn& f, const SignedMeasure& m) {
    double total = 0.0;
    for (const Atom& a : m.atoms()) total += a.weight * f(a.point);
    for (const DensityPiece& p : m.densities())
        total += p.density * integrate_range(f.breakpoints(p.edge), p.from, p.to);
    return total;
}

bool is_subharmonic(const PiecewiseAffineFn& f, const GraphRegion& region) {
    const LaplacianMeasure lap = laplacian(f);
    auto inside = [&](const SpacePoint& p) {
        if (p.is_vertex()) return std::find(region.vertices.begin(), region.vertices.end(), p.vertex()) != region.vertices.end();
        return std::find(region.edges.begin(), region.edges.end(), p.edge()) != region.edges.end();
    };
    for (const Atom& a : lap.atoms())
        if (inside(a.point) && a.weight < -1e-12) return false;
    return true;
}

}  // namespace berkgreen
