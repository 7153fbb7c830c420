#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "berkgreen/green.hpp"
#include "berkgreen/kernel.hpp"
#include "berkgreen/measure.hpp"

namespace berkgreen {

enum class Solver { FrankWolfe, ProjectedGradient };

std::string_view to_string(Solver solver);
/// Accepts "frank-wolfe", "frank_wolfe", "projected-gradient", "projected_gradient".
Solver parse_solver(std::string_view text);

struct SolverOptions {
    std::size_t max_iter = 100000;
    /// Frank-Wolfe duality gap at which the solver stops.
    double tol = 1e-8;
    Solver solver = Solver::FrankWolfe;
    /// Finish with an active-set solve of the KKT system on the support.
    bool polish = true;
    /// Record the objective after every iteration.
    bool record_history = false;
};

struct SimplexSolution {
    Eigen::VectorXd weights;
    double value = 0.0;
    double gap = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> history;
};

/// Minimizes w^T Q w over the probability simplex. Q must be symmetric and
/// convex along the simplex (d^T Q d >= 0 for every d with sum(d) = 0).
///
/// Frank-Wolfe uses away steps and exact line search, breaking ties by the
/// lowest index. Projected gradient uses the step 1 / L with L the curvature
/// on the simplex directions.
SimplexSolution minimize_on_simplex(const Eigen::MatrixXd& q, const SolverOptions& options = {});

/// Discretized mu-energy on a mesh: gram(i, j) = g_mu(mesh_i, mesh_j).
struct SimplexQP {
    std::vector<SpacePoint> mesh;
    Eigen::MatrixXd gram;

    double objective(const Eigen::VectorXd& w) const { return w.dot(gram * w); }
};

/// Mesh for the energy problem: space.mesh(h) plus the atoms of mu; type-I points excluded.
std::vector<SpacePoint> energy_mesh(const GreenFunction& g, double mesh_h);
SimplexQP energy_qp(const GreenFunction& g, std::vector<SpacePoint> mesh);

/// Projection of mu onto mesh weights: atoms and densities are split linearly
/// between the neighbouring mesh points of their edge. Total mass is preserved.
std::vector<double> discretize(const MetricGraph& graph, const SignedMeasure& mu, std::span<const SpacePoint> mesh);

struct EquilibriumResult {
    enum class Scope { FullMesh, Support };

    std::vector<SpacePoint> mesh;
    std::vector<double> weights;
    SignedMeasure minimizer;
    /// (Q w)_i: the discrete potential of the minimizer at every mesh point.
    std::vector<double> potential;
    double value = 0.0;
    double robin_constant = 0.0;
    double capacity = 0.0;
    bool positive_capacity = true;
    double frostman_deviation = 0.0;
    Scope frostman_scope = Scope::FullMesh;
    double gap = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double mesh_h = 0.0;
};

/// Minimizes I_mu over probability measures on energy_mesh(g, mesh_h).
EquilibriumResult minimize_energy(const GreenFunction& g, double mesh_h, const SolverOptions& options = {});

/// V(mu) = inf I_mu, approximated on the mesh.
double robin_constant(const GreenFunction& g, double mesh_h, const SolverOptions& options = {});

/// A compact set given as closed sub-segments of edges and isolated points.
struct Region {
    struct Segment {
        int edge = 0;
        double from = 0.0;
        double to = 0.0;
    };
    std::vector<Segment> segments;
    std::vector<SpacePoint> points;
};

/// Segment endpoints, points, and interior points at spacing <= h; deduplicated.
std::vector<SpacePoint> region_mesh(const MetricGraph& graph, const Region& region, double h, bool include_type_one = false);
bool region_contains(const MetricGraph& graph, const Region& region, const SpacePoint& p);

/// Capacity of E relative to zeta: minimizes the energy of the three-variable
/// kernel g_{zeta0}(zeta, x, y) over probability measures on E's mesh and
/// reports gamma = exp(-inf). A region made only of type-I points has value
/// +inf and capacity 0.
EquilibriumResult capacity(const KernelHandle& kernel, const SpacePoint& zeta, const Region& region, double mesh_h,
                           const SolverOptions& options = {});

/// Max |potential - value| over the full mesh (energy problem) or over the
/// support of the minimizer (capacity problem).
double frostman_check(const EquilibriumResult& result);

}  // namespace berkgreen
