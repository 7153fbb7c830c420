#pragma once

#include <memory>

#include <Eigen/Dense>

#include "berkgreen/measure.hpp"
#include "berkgreen/metric_space.hpp"
#include "berkgreen/paf.hpp"

namespace berkgreen {

/// Potential kernel g_zeta(x, y) of a metric graph for every pair of points.
///
/// The graph is subdivided at zeta, the weighted Laplacian (edge weight
/// 1 / length) is grounded at zeta and inverted once. Values at edge-interior
/// points follow exactly from the vertex values: g(., y) is affine on every
/// edge not containing y, and has a kink of total outgoing slope -1 at y.
class GraphKernel {
public:
    GraphKernel(std::shared_ptr<const MetricGraph> graph, const SpacePoint& zeta);

    const MetricGraph& graph() const { return *graph_; }
    const SpacePoint& base() const { return zeta_; }

    double operator()(const SpacePoint& x, const SpacePoint& y) const;

    /// Integral of g(x, .) over a density piece, with unit density.
    double integral(const SpacePoint& x, const DensityPiece& piece) const;
    /// Double integral of g over two density pieces, with unit densities.
    double integral(const DensityPiece& p, const DensityPiece& q) const;

private:
    struct Local {
        int vertex = -1;  // >= 0 for vertices of the subdivided graph
        int edge = -1;
        double offset = 0.0;
    };
    struct LocalEdge {
        int u;
        int v;
        double length;
    };
    struct LocalPiece {
        int edge;
        double from;
        double to;
    };

    Local localize(const SpacePoint& p) const;
    Local local_point(int edge, double offset) const;
    std::vector<LocalPiece> localize(const DensityPiece& piece) const;
    double vertex_value(int a, const Local& y) const;
    double eval(const Local& x, const Local& y) const;
    double piece_integral(const Local& x, const LocalPiece& p) const;
    double piece_integral(const LocalPiece& p, const LocalPiece& q) const;

    std::shared_ptr<const MetricGraph> graph_;
    SpacePoint zeta_;
    std::vector<LocalEdge> edges_;
    int split_edge_ = -1;
    double split_offset_ = 0.0;
    int base_node_ = 0;
    Eigen::MatrixXd green_;
};

/// Result of solving dd^c g = delta_zeta - delta_y on a subdivided graph.
struct KernelSolve {
    SpacePoint base;
    SpacePoint pole;
    std::shared_ptr<const GraphRefinement> refinement;
    PiecewiseAffineFn values;

    /// Value at a point of the original (unrefined) graph.
    double at(const SpacePoint& original) const { return values(refinement->map(original)); }
};

/// Direct per-pole solve: refine at zeta and y, solve the grounded Laplacian
/// system, extend affinely along edges. zeta == y yields the zero function.
KernelSolve solve_graph_kernel(std::shared_ptr<const MetricGraph> graph, const SpacePoint& zeta, const SpacePoint& y);

/// The potential kernel g_{zeta0}(x, y) on a skeleton-plus-trees space.
///
/// Evaluation follows the case split of the extension to the whole space:
/// infinite on the type-I diagonal; the graph kernel at the retractions when
/// x and y retract to different points; otherwise the graph kernel at the
/// common retraction plus the distance from the meet point of x and y to it.
/// When zeta0 lies in a hanging tree the skeleton used is enlarged by the path
/// from the attach vertex to zeta0.
class KernelHandle {
public:
    KernelHandle(MetricSpace space, const SpacePoint& zeta0);

    const MetricSpace& space() const { return space_; }
    const SpacePoint& base() const { return zeta0_; }
    const GraphKernel& graph_kernel() const { return *graph_; }

    double operator()(const SpacePoint& x, const SpacePoint& y) const;

    /// g_{zeta0}(zeta, x, y) = g(x, y) - g(x, zeta) - g(y, zeta); +inf when
    /// x = y = zeta is of type I.
    double three_variable(const SpacePoint& zeta, const SpacePoint& x, const SpacePoint& y) const;

    /// Retraction onto the skeleton enlarged to contain zeta0.
    SpacePoint base_retract(const SpacePoint& x) const;

    /// Integral of g(x, .) against m. Infinite if m has an atom at x of type I.
    double integrate(const SpacePoint& x, const SignedMeasure& m) const;
    /// Double integral of g against a (x) b.
    double integrate(const SignedMeasure& a, const SignedMeasure& b) const;

private:
    MetricSpace space_;
    SpacePoint zeta0_;
    int base_component_;
    std::shared_ptr<const GraphKernel> graph_;
};

/// |g_zeta(x,y) - (g_zeta'(x,y) - g_zeta'(x,zeta) - g_zeta'(y,zeta) + g_zeta'(zeta,zeta))|.
double base_change_residual(const KernelHandle& at_zeta, const KernelHandle& at_zeta_prime, const SpacePoint& x,
                            const SpacePoint& y);
double base_change_residual(const MetricSpace& space, const SpacePoint& zeta, const SpacePoint& zeta_prime,
                            const SpacePoint& x, const SpacePoint& y);

}  // namespace berkgreen
