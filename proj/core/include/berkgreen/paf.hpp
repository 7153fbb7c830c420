#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "berkgreen/measure.hpp"
#include "berkgreen/metric_space.hpp"

namespace berkgreen {

struct Breakpoint {
    double offset = 0.0;
    double value = 0.0;
};

/// Orientation along an edge: Forward points toward increasing offset.
enum class Direction { Forward, Backward };

/// Continuous piecewise-affine function on a metric graph, stored as per-edge
/// breakpoint lists that include both edge endpoints.
class PiecewiseAffineFn {
public:
    /// `per_edge[e]` must start at offset 0, end at the edge length, be strictly
    /// increasing, and agree with the other edges at shared vertices.
    PiecewiseAffineFn(std::shared_ptr<const MetricGraph> graph, std::vector<std::vector<Breakpoint>> per_edge);

    /// Affine on every edge, interpolating the given vertex values.
    static PiecewiseAffineFn from_vertex_values(std::shared_ptr<const MetricGraph> graph, std::span<const double> values);
    static PiecewiseAffineFn constant(std::shared_ptr<const MetricGraph> graph, double c);
    /// Samples `f` at the endpoints and at `breaks[e]` on every edge.
    static PiecewiseAffineFn sample(std::shared_ptr<const MetricGraph> graph,
                                    const std::function<double(const SpacePoint&)>& f,
                                    const std::vector<std::vector<double>>& breaks);

    const MetricGraph& graph() const { return *graph_; }
    std::shared_ptr<const MetricGraph> graph_ptr() const { return graph_; }
    std::span<const Breakpoint> breakpoints(int edge) const { return per_edge_.at(static_cast<std::size_t>(edge)); }
    double vertex_value(int v) const { return vertex_values_.at(static_cast<std::size_t>(v)); }

    double operator()(const SpacePoint& x) const;

    /// One-sided derivative at `x` into `edge` in direction `dir`.
    /// Throws InputError if `x` is not on `edge`, or if `dir` leaves the edge.
    double outgoing_slope(const SpacePoint& x, int edge, Direction dir) const;

    double max_abs_slope() const;

    /// a * f + b * g on a common breakpoint set. Both must live on the same graph.
    static PiecewiseAffineFn combine(double a, const PiecewiseAffineFn& f, double b, const PiecewiseAffineFn& g);

private:
    PiecewiseAffineFn(std::shared_ptr<const MetricGraph> graph, std::vector<std::vector<Breakpoint>> per_edge,
                      std::vector<double> vertex_values);

    std::shared_ptr<const MetricGraph> graph_;
    std::vector<std::vector<Breakpoint>> per_edge_;
    std::vector<double> vertex_values_;
};

/// dd^c f: an atom at every point where the sum of outgoing slopes is nonzero
/// (|weight| < 1e-12 dropped), weighted by that sum.
LaplacianMeasure laplacian(const PiecewiseAffineFn& f);

/// Exact integral of f against m (trapezoid-exact on density pieces).
double pair(const PiecewiseAffineFn& f, const SignedMeasure& m);

/// Edges and vertices of a region. Atoms count as inside when they lie in the
/// interior of a listed edge or on a listed vertex.
struct GraphRegion {
    std::vector<int> edges;
    std::vector<int> vertices;
};

/// True iff every Laplacian atom inside `region` has weight >= -1e-12.
bool is_subharmonic(const PiecewiseAffineFn& f, const GraphRegion& region);

}  // namespace berkgreen
