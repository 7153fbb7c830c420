#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "berkgreen/bl_distance.hpp"
#include "berkgreen/elliptic.hpp"
#include "berkgreen/minimization.hpp"
#include "support/oracles.hpp"

using namespace berkgreen;
namespace bt = berkgreen::testing;

namespace {

Eigen::VectorXd random_simplex(std::mt19937_64& rng, Eigen::Index n) {
    std::exponential_distribution<double> ex(1.0);
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = ex(rng);
    return w / w.sum();
}

SignedMeasure atomic(std::span<const SpacePoint> mesh, const Eigen::VectorXd& w) {
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < mesh.size(); ++i)
        if (w(static_cast<Eigen::Index>(i)) != 0.0) atoms.push_back({mesh[i], w(static_cast<Eigen::Index>(i))});
    return SignedMeasure(std::move(atoms));
}

SpaceDescription good_reduction_space() {
    SpaceDescription d{{{"zeta0", PointType::II}}, {}, {}};
    TreeDescription t;
    t.attach = "zeta0";
    t.vertices = {{"w", PointType::II}, {"P", PointType::II}, {"Q", PointType::II}};
    t.edges = {{"zw", "zeta0", "w", 0.8}, {"wP", "w", "P", 0.5}, {"wQ", "w", "Q", 0.3}};
    t.leaf_types = {{"P", PointType::I}};
    d.trees.push_back(t);
    return d;
}

}  // namespace

TEST(Simplex, TwoByTwoClosedForm) {
    Eigen::MatrixXd q(2, 2);
    q << 2.0, 0.5, 0.5, 1.0;
    // optimum of a w^2 + 2 b w (1 - w) + c (1 - w)^2 at w = (c - b) / (a - 2b + c)
    const double w = (1.0 - 0.5) / (2.0 - 1.0 + 1.0);
    const double value = 2.0 * w * w + 2.0 * 0.5 * w * (1 - w) + (1 - w) * (1 - w);
    for (Solver solver : {Solver::FrankWolfe, Solver::ProjectedGradient}) {
        SolverOptions opts;
        opts.solver = solver;
        const SimplexSolution s = minimize_on_simplex(q, opts);
        EXPECT_TRUE(s.converged) << to_string(solver);
        EXPECT_NEAR(s.weights(0), w, 1e-7) << to_string(solver);
        EXPECT_NEAR(s.value, value, 1e-10) << to_string(solver);
    }
}

TEST(Simplex, VertexOptimum) {
    Eigen::MatrixXd q(3, 3);
    q << 1.0, 2.0, 2.0, 2.0, 3.0, 2.5, 2.0, 2.5, 4.0;
    const SimplexSolution s = minimize_on_simplex(q);
    EXPECT_DOUBLE_EQ(s.weights(0), 1.0);
    EXPECT_DOUBLE_EQ(s.value, 1.0);
    EXPECT_EQ(s.gap, 0.0);
}

TEST(Simplex, TiesPickLowestIndex) {
    const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(3, 3) + Eigen::MatrixXd::Constant(3, 3, 1.0);
    SolverOptions opts;
    opts.polish = false;
    opts.max_iter = 1;
    const SimplexSolution s = minimize_on_simplex(q, opts);
    EXPECT_GT(s.weights(0), s.weights(2));
}

TEST(Simplex, SolversAgreeAndHistoryIsMonotone) {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 12;
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
        const Eigen::MatrixXd q = a.transpose() * a;
        SolverOptions fw;
        fw.record_history = true;
        fw.polish = false;
        const SimplexSolution x = minimize_on_simplex(q, fw);
        for (std::size_t i = 1; i < x.history.size(); ++i) EXPECT_LE(x.history[i], x.history[i - 1] + 1e-12);
        SolverOptions pg;
        pg.solver = Solver::ProjectedGradient;
        const SimplexSolution y = minimize_on_simplex(q, pg);
        EXPECT_NEAR(x.value, y.value, 1e-6);
        EXPECT_NEAR(x.weights.sum(), 1.0, 1e-12);
        EXPECT_GE(x.weights.minCoeff(), 0.0);
    }
}

TEST(Simplex, RejectsNonSquare) {
    EXPECT_THROW(minimize_on_simplex(Eigen::MatrixXd(2, 3)), InputError);
    EXPECT_THROW(minimize_on_simplex(Eigen::MatrixXd(0, 0)), InputError);
}

TEST(Simplex, ParseSolver) {
    EXPECT_EQ(parse_solver("frank-wolfe"), Solver::FrankWolfe);
    EXPECT_EQ(parse_solver("projected_gradient"), Solver::ProjectedGradient);
    EXPECT_THROW(parse_solver("newton"), InputError);
}

TEST(EnergyQP, GramIsSymmetricAndPositiveOnSimplex) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        SpaceDescription d = bt::random_skeleton(rng, 5);
        bt::add_random_trees(d, rng);
        const MetricSpace s(d);
        const GreenFunction g = GreenFunction::build(s, bt::random_probability(s.graph(), rng, 1, 1), bt::random_point(s.graph(), rng, false));
        const SimplexQP qp = energy_qp(g, energy_mesh(g, 0.25));
        for (const SpacePoint& p : qp.mesh) EXPECT_NE(s.type(p), PointType::I);
        EXPECT_LE((qp.gram - qp.gram.transpose()).cwiseAbs().maxCoeff(), 1e-9);
        for (int i = 0; i < 100; ++i) EXPECT_GE(qp.objective(random_simplex(rng, qp.gram.rows())), -1e-8);
    }
}

TEST(Discretize, PreservesMassAndSplitsLinearly) {
    const MetricSpace s(bt::segment(1.0));
    const auto& g = s.graph();
    const std::vector<SpacePoint> mesh = s.mesh(0.5);
    ASSERT_EQ(mesh.size(), 3u);
    const std::vector<double> w = discretize(g, SignedMeasure::dirac(g.point(0, 0.125)), mesh);
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    EXPECT_NEAR(total, 1.0, 1e-15);
    std::vector<double> sorted = w;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_NEAR(sorted[2], 0.75, 1e-15);
    EXPECT_NEAR(sorted[1], 0.25, 1e-15);
    const std::vector<double> u = discretize(g, SignedMeasure::uniform(g), mesh);
    EXPECT_NEAR(std::accumulate(u.begin(), u.end(), 0.0), 1.0, 1e-15);
}

TEST(MinimizeEnergy, CircleHaar) {
    const EllipticModel circle = build_elliptic(Reduction::Multiplicative, 1.0);
    const double h = 0.01;
    const GreenFunction g = elliptic_green(circle, 0.0);
    const EquilibriumResult r = minimize_energy(g, h);
    EXPECT_LE(r.value, 1e-3);
    EXPECT_GE(r.value, -5 * h);
    EXPECT_LE(bl_distance(circle.space, r.minimizer, circle.mu), 5 * h);
    EXPECT_LE(r.frostman_deviation, 10 * h);
    EXPECT_EQ(r.frostman_scope, EquilibriumResult::Scope::FullMesh);
    EXPECT_DOUBLE_EQ(r.robin_constant, r.value);

    // the discretized measure is a feasible candidate, so V is no larger than its energy
    const SimplexQP qp = energy_qp(g, r.mesh);
    const std::vector<double> d = discretize(circle.space.graph(), circle.mu, r.mesh);
    const Eigen::VectorXd dw = Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
    EXPECT_LE(std::abs(qp.objective(dw)), 5 * h);
    EXPECT_LE(r.value, qp.objective(dw) + 1e-12);
}

TEST(MinimizeEnergy, GoodReductionDirac) {
    const MetricSpace s(good_reduction_space());
    const SpacePoint zeta0 = s.graph().vertex_point("zeta0");
    const GreenFunction g = GreenFunction::build(s, SignedMeasure::dirac(zeta0), zeta0);
    const EquilibriumResult r = minimize_energy(g, 0.05);
    EXPECT_LE(std::abs(r.value), 1e-8);
    EXPECT_LE(r.frostman_deviation, 1e-6);
    EXPECT_NEAR(r.minimizer.merged().atoms().front().weight, 1.0, 1e-9);
    EXPECT_EQ(r.minimizer.merged().atoms().front().point, zeta0);
    EXPECT_LE(std::abs(robin_constant(g, 0.05)), 1e-8);
}

TEST(MinimizeEnergy, UniquenessShadow) {
    std::mt19937_64 rng(43);
    const EllipticModel circle = build_elliptic(Reduction::Multiplicative, 2.0);
    const double h = 0.05;
    const GreenFunction g = elliptic_green(circle);
    const SimplexQP qp = energy_qp(g, energy_mesh(g, h));
    const std::vector<double> d = discretize(circle.space.graph(), circle.mu, qp.mesh);
    const Eigen::VectorXd dw = Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
    const TestDictionary dict(circle.space);
    const SignedMeasure reference = atomic(qp.mesh, dw);
    for (int i = 0; i < 200; ++i) {
        const double t = std::uniform_real_distribution<double>(0.0, 0.2)(rng);
        const Eigen::VectorXd w = (1 - t) * dw + t * random_simplex(rng, dw.size());
        if (qp.objective(w) <= 1e-6) EXPECT_LE(dict.distance(atomic(qp.mesh, w), reference), 10 * h);
    }
}

TEST(Capacity, SegmentPoint) {
    const MetricSpace s(bt::segment(2.0));
    const auto& g = s.graph();
    const KernelHandle k(s, g.vertex_point("v0"));
    Region e;
    e.points = {g.vertex_point("v1")};
    const EquilibriumResult r = capacity(k, g.vertex_point("v0"), e, 0.1);
    EXPECT_NEAR(r.value, 2.0, 1e-12);
    EXPECT_NEAR(r.capacity, std::exp(-2.0), 1e-12);
    EXPECT_TRUE(r.positive_capacity);
    EXPECT_EQ(r.frostman_scope, EquilibriumResult::Scope::Support);
}

TEST(Capacity, SinglePointFormula) {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 20; ++trial) {
        SpaceDescription d = bt::random_skeleton(rng, 5);
        bt::add_random_trees(d, rng);
        const MetricSpace s(d);
        const auto& g = s.graph();
        const SpacePoint zeta0 = bt::random_point(g, rng, false);
        const SpacePoint zeta = bt::random_point(g, rng);
        const SpacePoint z = bt::random_point(g, rng, false);
        if (z == zeta) continue;
        const KernelHandle k(s, zeta0);
        Region e;
        e.points = {z};
        const EquilibriumResult r = capacity(k, zeta, e, 0.1);
        EXPECT_NEAR(r.value, k(z, z) - 2 * k(z, zeta), 1e-10);
    }
}

TEST(Capacity, Errors) {
    const MetricSpace s(good_reduction_space());
    const auto& g = s.graph();
    const KernelHandle k(s, g.vertex_point("zeta0"));
    Region e;
    e.segments = {{g.edge_index("zw"), 0.2, 0.6}};
    EXPECT_THROW(capacity(k, g.point("zw", 0.4), e, 0.1), InputError);
    EXPECT_THROW(capacity(k, g.vertex_point("zeta0"), Region{}, 0.1), InputError);
    Region leaves;
    leaves.points = {g.vertex_point("P")};
    const EquilibriumResult r = capacity(k, g.vertex_point("zeta0"), leaves, 0.1);
    EXPECT_TRUE(std::isinf(r.value));
    EXPECT_EQ(r.capacity, 0.0);
    EXPECT_FALSE(r.positive_capacity);
}

TEST(Capacity, MonotoneInRegion) {
    std::mt19937_64 rng(45);
    for (int trial = 0; trial < 10; ++trial) {
        SpaceDescription d = bt::random_skeleton(rng, 4);
        const MetricSpace s(d);
        const auto& g = s.graph();
        const KernelHandle k(s, g.vertex_point(g.vertex(0).id));
        const int edge = static_cast<int>(g.edge_count()) - 1;
        const double len = g.edge(edge).length;
        const SpacePoint zeta = g.point(0, g.edge(0).length * 0.5);
        if (edge == 0) continue;
        Region small;
        small.segments = {{edge, 0.3 * len, 0.5 * len}};
        Region large;
        large.segments = {{edge, 0.1 * len, 0.9 * len}};
        large.points = {g.vertex_point(g.vertex(g.edge(edge).v).id)};
        const double h = len / 40;
        const EquilibriumResult a = capacity(k, zeta, small, h);
        const EquilibriumResult b = capacity(k, zeta, large, h);
        EXPECT_LE(a.capacity, b.capacity + 1e-9);
        EXPECT_LE(a.frostman_deviation, 10 * h);
    }
}

TEST(Capacity, BasePointRobustness) {
    std::mt19937_64 rng(46);
    for (int trial = 0; trial < 20; ++trial) {
        SpaceDescription d = bt::random_skeleton(rng, 5);
        bt::add_random_trees(d, rng);
        const MetricSpace s(d);
        const auto& g = s.graph();
        const SpacePoint zeta0 = bt::random_point(g, rng, false);
        const SpacePoint zeta0p = bt::random_point(g, rng, false);
        const SpacePoint zeta = bt::random_skeleton_point(s, rng);
        const int edge = static_cast<int>(rng() % g.edge_count());
        Region e;
        e.segments = {{edge, 0.25 * g.edge(edge).length, 0.75 * g.edge(edge).length}};
        if (region_contains(g, e, zeta)) continue;
        const KernelHandle k(s, zeta0);
        const KernelHandle kp(s, zeta0p);
        const EquilibriumResult a = capacity(k, zeta, e, 0.1);
        const EquilibriumResult b = capacity(kp, zeta, e, 0.1);
        EXPECT_EQ(a.positive_capacity, b.positive_capacity);
        EXPECT_NEAR(a.value - b.value, 2 * kp(zeta, zeta0) - kp(zeta0, zeta0), 1e-8);
    }
}

TEST(Region, MeshAndContainment) {
    const MetricSpace s(good_reduction_space());
    const auto& g = s.graph();
    Region e;
    e.segments = {{g.edge_index("zw"), 0.2, 0.6}};
    e.points = {g.vertex_point("P"), g.vertex_point("Q")};
    const auto mesh = region_mesh(g, e, 0.1);
    EXPECT_EQ(mesh.size(), 6u);
    EXPECT_EQ(region_mesh(g, e, 0.1, true).size(), 7u);
    EXPECT_TRUE(region_contains(g, e, g.point("zw", 0.6)));
    EXPECT_TRUE(region_contains(g, e, g.vertex_point("Q")));
    EXPECT_FALSE(region_contains(g, e, g.point("zw", 0.65)));
}
