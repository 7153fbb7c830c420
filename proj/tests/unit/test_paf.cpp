#include <gtest/gtest.h>

#include "berkgreen/paf.hpp"
#include "support/oracles.hpp"

using namespace berkgreen;
namespace bt = berkgreen::testing;

namespace {

double weight_at(const SignedMeasure& m, const SpacePoint& p) {
    double w = 0.0;
    const SignedMeasure merged = m.merged();
    for (const Atom& a : merged.atoms())
        if (a.point == p) w += a.weight;
    return w;
}

struct Fixture {
    MetricSpace space{bt::segment(2.0)};
    std::shared_ptr<const MetricGraph> g = space.graph_ptr();
    SpacePoint left = g->vertex_point("v0");
    SpacePoint right = g->vertex_point("v1");
    SpacePoint mid = g->point(0, 1.0);

    PiecewiseAffineFn identity() const { return PiecewiseAffineFn(g, {{{0.0, 0.0}, {2.0, 2.0}}}); }
    PiecewiseAffineFn tent() const { return PiecewiseAffineFn(g, {{{0.0, 0.0}, {1.0, 1.0}, {2.0, 0.0}}}); }
};

}  // namespace

TEST(Paf, EvaluationAndSlopes) {
    Fixture f;
    const auto id = f.identity();
    EXPECT_DOUBLE_EQ(id(f.g->point(0, 0.3)), 0.3);
    EXPECT_DOUBLE_EQ(id.outgoing_slope(f.left, 0, Direction::Forward), 1.0);
    EXPECT_DOUBLE_EQ(id.outgoing_slope(f.right, 0, Direction::Backward), -1.0);
    const auto c = PiecewiseAffineFn::constant(f.g, 4.0);
    EXPECT_DOUBLE_EQ(c.outgoing_slope(f.mid, 0, Direction::Forward), 0.0);
    EXPECT_DOUBLE_EQ(c.outgoing_slope(f.mid, 0, Direction::Backward), 0.0);
    const auto t = f.tent();
    EXPECT_DOUBLE_EQ(t.outgoing_slope(f.mid, 0, Direction::Forward), -1.0);
    EXPECT_DOUBLE_EQ(t.outgoing_slope(f.mid, 0, Direction::Backward), -1.0);
    EXPECT_DOUBLE_EQ(t.max_abs_slope(), 1.0);
}

TEST(Paf, SlopeRejectsForeignEdge) {
    const MetricSpace s({{{"a"}, {"b"}, {"c"}}, {{"ab", "a", "b", 1.0}, {"bc", "b", "c", 1.0}}, {}});
    const auto f = PiecewiseAffineFn::constant(s.graph_ptr(), 1.0);
    EXPECT_THROW(f.outgoing_slope(s.graph().vertex_point("a"), 1, Direction::Forward), InputError);
    EXPECT_THROW(f.outgoing_slope(s.graph().vertex_point("a"), 0, Direction::Backward), InputError);
}

TEST(Paf, RejectsInconsistentVertexValues) {
    const MetricSpace s({{{"a"}, {"b"}}, {{"e1", "a", "b", 1.0}, {"e2", "a", "b", 1.0}}, {}});
    EXPECT_THROW(PiecewiseAffineFn(s.graph_ptr(), {{{0.0, 0.0}, {1.0, 1.0}}, {{0.0, 0.0}, {1.0, 2.0}}}), InputError);
}

TEST(Paf, LaplacianExamples) {
    Fixture f;
    const SignedMeasure lid = laplacian(f.identity());
    EXPECT_DOUBLE_EQ(weight_at(lid, f.left), 1.0);
    EXPECT_DOUBLE_EQ(weight_at(lid, f.right), -1.0);
    EXPECT_EQ(lid.merged().atoms().size(), 2u);

    EXPECT_TRUE(laplacian(PiecewiseAffineFn::constant(f.g, 3.0)).merged().empty());

    const SignedMeasure lt = laplacian(f.tent());
    EXPECT_DOUBLE_EQ(weight_at(lt, f.left), 1.0);
    EXPECT_DOUBLE_EQ(weight_at(lt, f.right), 1.0);
    EXPECT_DOUBLE_EQ(weight_at(lt, f.mid), -2.0);
}

TEST(Paf, LaplacianHasZeroMass) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const MetricSpace s(bt::random_skeleton(rng, 8));
        const auto& g = s.graph();
        std::vector<std::vector<double>> breaks(g.edge_count());
        for (std::size_t e = 0; e < g.edge_count(); ++e) breaks[e] = {0.3 * g.edge(static_cast<int>(e)).length};
        std::uniform_real_distribution<double> u(-1, 1);
        std::map<SpacePoint, double> values;
        const auto f = PiecewiseAffineFn::sample(s.graph_ptr(), [&](const SpacePoint& p) {
            auto [it, fresh] = values.emplace(p, 0.0);
            if (fresh) it->second = u(rng);
            return it->second;
        }, breaks);
        EXPECT_NEAR(laplacian(f).total_mass(), 0.0, 1e-12);
    }
}

TEST(Paf, PairExamples) {
    const MetricSpace s(bt::segment(1.0));
    const auto g = s.graph_ptr();
    const PiecewiseAffineFn id(g, {{{0.0, 0.0}, {1.0, 1.0}}});
    EXPECT_DOUBLE_EQ(pair(id, SignedMeasure({}, {{0, 0.0, 1.0, 1.0}})), 0.5);
    EXPECT_DOUBLE_EQ(pair(id, SignedMeasure::dirac(g->point(0, 0.3))), 0.3);
    EXPECT_DOUBLE_EQ(pair(id, SignedMeasure::dirac(g->vertex_point("v0")) - SignedMeasure::dirac(g->vertex_point("v1"))), -1.0);
}

TEST(Paf, PairMatchesQuadratureOnKinks) {
    Fixture f;
    const auto t = f.tent();
    // density on [0.5, 1.7] crossing the peak: integral by fine midpoint rule
    const SignedMeasure m({}, {{0, 0.5, 1.7, 2.0}});
    double reference = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double s = 0.5 + 1.2 * (i + 0.5) / n;
        reference += 2.0 * (s < 1.0 ? s : 2.0 - s) * 1.2 / n;
    }
    EXPECT_NEAR(pair(t, m), reference, 1e-9);
}

TEST(Paf, Combine) {
    Fixture f;
    const auto h = PiecewiseAffineFn::combine(2.0, f.identity(), -1.0, f.tent());
    for (double s : {0.0, 0.4, 1.0, 1.3, 2.0})
        EXPECT_NEAR(h(f.g->point(0, s)), 2.0 * s - (s < 1.0 ? s : 2.0 - s), 1e-15);
}

TEST(Paf, Subharmonicity) {
    Fixture f;
    const GraphRegion interior{{0}, {}};
    EXPECT_TRUE(is_subharmonic(f.identity(), interior));
    EXPECT_FALSE(is_subharmonic(f.tent(), interior));
    const PiecewiseAffineFn convex(f.g, {{{0.0, 1.0}, {0.5, 0.2}, {1.2, 0.0}, {2.0, 1.0}}});
    EXPECT_TRUE(is_subharmonic(convex, interior));
}

TEST(Measure, AtomizeMidpoints) {
    const MetricSpace s(bt::segment(1.0));
    const SignedMeasure m = atomize(s.graph(), SignedMeasure({}, {{0, 0.0, 1.0, 1.0}}), 0.5);
    ASSERT_EQ(m.atoms().size(), 2u);
    EXPECT_EQ(m.atoms()[0].point, s.graph().point(0, 0.25));
    EXPECT_DOUBLE_EQ(m.atoms()[0].weight, 0.5);
    EXPECT_EQ(m.atoms()[1].point, s.graph().point(0, 0.75));
    const SignedMeasure atomic = SignedMeasure::dirac(s.graph().point(0, 0.4), 0.7);
    EXPECT_EQ(atomize(s.graph(), atomic, 0.1), atomic);
}

TEST(Measure, AtomizePreservesMass) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const MetricSpace s(bt::random_skeleton(rng, 6));
        const SignedMeasure m = bt::random_probability(s.graph(), rng, 2, 3);
        EXPECT_NEAR(atomize(s.graph(), m, 0.07).total_mass(), m.total_mass(), 1e-14);
    }
}

TEST(Measure, Validation) {
    const MetricSpace s(bt::segment(1.0));
    EXPECT_THROW(SignedMeasure({}, {{0, 0.5, 1.5, 1.0}}).validate(s.graph()), InputError);
    EXPECT_THROW(SignedMeasure({}, {{3, 0.0, 0.5, 1.0}}).validate(s.graph()), InputError);
    EXPECT_FALSE(SignedMeasure::dirac(s.graph().vertex_point("v0"), 0.5).is_probability());
    EXPECT_FALSE((SignedMeasure::dirac(s.graph().vertex_point("v0"), 2.0) - SignedMeasure::dirac(s.graph().vertex_point("v1"))).is_probability());
}
