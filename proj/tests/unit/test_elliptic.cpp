#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "berkgreen/bl_distance.hpp"
#include "berkgreen/elliptic.hpp"

using namespace berkgreen;

namespace {

double circle_green(double d, double l) {
    d = std::fmod(std::abs(d), l);
    d = std::min(d, l - d);
    return d * d / (2 * l) - d / 2 + l / 12;
}

TreeDescription two_leaves(double d) {
    TreeDescription t;
    t.attach = "zeta0";
    t.vertices = {{"w", PointType::II}, {"P", PointType::II}, {"Q", PointType::II}};
    t.edges = {{"zw", "zeta0", "w", d}, {"wP", "w", "P", 0.4}, {"wQ", "w", "Q", 0.7}};
    t.leaf_types = {{"P", PointType::I}, {"Q", PointType::I}};
    return t;
}

}  // namespace

TEST(Elliptic, BuildGood) {
    const EllipticModel m = build_elliptic(Reduction::Good, -2.0);
    EXPECT_EQ(m.space.graph().vertex_count(), 1u);
    EXPECT_EQ(m.circumference(), 0.0);
    ASSERT_EQ(m.mu.atoms().size(), 1u);
    EXPECT_EQ(m.mu.atoms()[0].point, m.base);
    EXPECT_TRUE(has_continuous_potentials(m.space, m.mu));
}

TEST(Elliptic, BuildMultiplicative) {
    const EllipticModel m = build_elliptic(Reduction::Multiplicative, 3.0);
    EXPECT_DOUBLE_EQ(m.circumference(), 3.0);
    EXPECT_DOUBLE_EQ(m.space.graph().total_length(), 3.0);
    EXPECT_NEAR(m.mu.total_mass(), 1.0, 1e-15);
    for (const DensityPiece& p : m.mu.densities()) EXPECT_DOUBLE_EQ(p.density, 1.0 / 3.0);
    EXPECT_THROW(build_elliptic(Reduction::Multiplicative, 0.0), InputError);
    EXPECT_THROW(build_elliptic(Reduction::Multiplicative, -1.0), InputError);
    EXPECT_EQ(parse_reduction("multiplicative"), Reduction::Multiplicative);
    EXPECT_THROW(parse_reduction("additive"), InputError);
}

TEST(Elliptic, CircleGreenClosedForm) {
    const double l = 2.5;
    const EllipticModel m = build_elliptic(Reduction::Multiplicative, l);
    const GreenFunction g = elliptic_green(m);
    for (double s : {0.0, 0.3, 1.1, 1.25, 2.4})
        for (double t : {0.1, 0.9, 2.0}) EXPECT_NEAR(g(m.arc_point(s), m.arc_point(t)), circle_green(s - t, l), 1e-12);
}

TEST(Discrepancy, SinglePoint) {
    const EllipticModel m = build_elliptic(Reduction::Multiplicative, 3.0);
    const std::vector<SpacePoint> z{m.arc_point(0.7)};
    EXPECT_NEAR(local_discrepancy(m, z), 3.0 / 12, 1e-14);
}

TEST(Discrepancy, EquispacedMatchesDoubleSum) {
    const double l = 3.0;
    const EllipticModel m = build_elliptic(Reduction::Multiplicative, l);
    for (std::size_t n : {2u, 5u, 16u, 33u}) {
        std::vector<SpacePoint> z;
        for (std::size_t i = 0; i < n; ++i) z.push_back(m.arc_point(l * static_cast<double>(i) / static_cast<double>(n)));
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) sum += circle_green(l * (static_cast<double>(i) - static_cast<double>(j)) / static_cast<double>(n), l);
        const double oracle = (sum + static_cast<double>(n) * l / 12) / static_cast<double>(n * n);
        EXPECT_NEAR(local_discrepancy(m, z), oracle, 1e-12);
        EXPECT_NEAR(oracle, l / (12.0 * static_cast<double>(n * n)), 1e-12);
    }
}

TEST(Discrepancy, GoodReductionLeaves) {
    const double d = 0.6;
    const EllipticModel m = build_elliptic(Reduction::Good, 0.0, {two_leaves(d)});
    const auto& g = m.space.graph();
    const std::vector<SpacePoint> z{g.vertex_point("P"), g.vertex_point("Q")};
    EXPECT_NEAR(local_discrepancy(m, z), d / 2, 1e-14);
}

TEST(Discrepancy, RejectsDuplicates) {
    const EllipticModel m = build_elliptic(Reduction::Multiplicative, 3.0);
    const std::vector<SpacePoint> z{m.arc_point(0.5), m.arc_point(0.5)};
    EXPECT_THROW(local_discrepancy(m, z), InputError);
}

TEST(Discrepancy, MatchesEnergyOffDiagonal) {
    const EllipticModel m = build_elliptic(Reduction::Multiplicative, 2.0);
    const GreenFunction g = elliptic_green(m);
    const std::vector<SpacePoint> z{m.arc_point(0.1), m.arc_point(0.45), m.arc_point(1.3), m.arc_point(1.9)};
    std::vector<Atom> atoms;
    for (const SpacePoint& p : z) atoms.push_back({p, 0.25});
    const EnergyReport r = energy(g, SignedMeasure(atoms));
    const double n = 4.0;
    EXPECT_NEAR(local_discrepancy(m, g, z) * n * n - n * 2.0 / 12, n * n * r.off_diagonal, 1e-10);
}

TEST(Generators, Deterministic) {
    const EllipticModel m = build_elliptic(Reduction::Multiplicative, 3.0);
    const Generator random = Generator::parse("random_uniform");
    EXPECT_EQ(generate_points(m, random, 20, 7), generate_points(m, random, 20, 7));
    EXPECT_NE(generate_points(m, random, 20, 7), generate_points(m, random, 20, 8));
    EXPECT_EQ(generate_points(m, Generator::parse("equispaced"), 4, 0).size(), 4u);
    EXPECT_THROW(Generator::parse("sobol"), InputError);
}

TEST(Generators, CustomPrefixes) {
    const EllipticModel m = build_elliptic(Reduction::Multiplicative, 3.0);
    Generator custom;
    custom.kind = Generator::Kind::Custom;
    custom.custom = {m.arc_point(0.0), m.arc_point(1.0), m.arc_point(2.0)};
    EXPECT_EQ(generate_points(m, custom, 2, 0).size(), 2u);
    EXPECT_ANY_THROW(generate_points(m, custom, 4, 0));
}

TEST(Equidistribution, EquispacedTrace) {
    const EllipticModel m = build_elliptic(Reduction::Multiplicative, 3.0);
    const std::vector<std::size_t> ns{4, 8, 16, 32, 64, 128};
    const DiscrepancyTrace t = equidistribution_experiment(m, Generator::parse("equispaced"), ns, 42);
    ASSERT_EQ(t.records.size(), ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        EXPECT_NEAR(t.records[i].discrepancy, 3.0 / (12.0 * static_cast<double>(ns[i] * ns[i])), 1e-12);
        if (i > 0) {
            EXPECT_LT(t.records[i].discrepancy, t.records[i - 1].discrepancy);
            EXPECT_LE(t.records[i].bl, t.records[i - 1].bl + 1e-12);
        }
    }
    EXPECT_LE(t.records.back().bl, 2 * t.bl_resolution);
    std::ostringstream csv;
    write_csv(csv, t);
    const std::string text = csv.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "n,D,BL,seed,h");
    EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), ns.size() + 1);
}

TEST(Equidistribution, ClusteredFloor) {
    const EllipticModel m = build_elliptic(Reduction::Multiplicative, 3.0);
    const std::vector<std::size_t> ns{8, 32, 128};
    const DiscrepancyTrace t = equidistribution_experiment(m, Generator::parse("clustered", 0.01), ns, 42);
    for (const DiscrepancyRecord& r : t.records) EXPECT_GT(r.discrepancy, 0.9 * 3.0 / 12);
}

TEST(Equidistribution, RandomIsReproducibleAndNonnegative) {
    const EllipticModel m = build_elliptic(Reduction::Multiplicative, 3.0);
    const std::vector<std::size_t> ns{4, 16, 64};
    const DiscrepancyTrace a = equidistribution_experiment(m, Generator::parse("random_uniform"), ns, 5);
    const DiscrepancyTrace b = equidistribution_experiment(m, Generator::parse("random_uniform"), ns, 5);
    for (std::size_t i = 0; i < ns.size(); ++i) {
        EXPECT_EQ(a.records[i].discrepancy, b.records[i].discrepancy);
        EXPECT_GE(a.records[i].discrepancy, -1e-9);
    }
    EXPECT_EQ(a.seed, 5u);
}

TEST(BoundedLipschitz, Dictionary) {
    const EllipticModel m = build_elliptic(Reduction::Multiplicative, 3.0);
    const TestDictionary dict(m.space);
    EXPECT_EQ(dict.size(), TestDictionary::kCenters * TestDictionary::kRadii);
    EXPECT_NEAR(dict.distance(m.mu, m.mu), 0.0, 1e-15);
    EXPECT_GT(dict.resolution(), 0.0);
    const SignedMeasure a = SignedMeasure::dirac(m.arc_point(0.0));
    const SignedMeasure b = SignedMeasure::dirac(m.arc_point(0.2));
    const double d = dict.distance(a, b);
    EXPECT_GT(d, 0.0);
    EXPECT_LE(d, 0.2 + 1e-12);
    EXPECT_NEAR(dict.distance(a, b), dict.distance(b, a), 1e-15);
    for (std::size_t k = 0; k < dict.size(); ++k) EXPECT_GE(dict.evaluate(k, m.arc_point(1.3)), 0.0);
}
