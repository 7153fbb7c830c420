#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "berkgreen/elliptic.hpp"
#include "berkgreen/io.hpp"

using namespace berkgreen;

namespace {

const std::filesystem::path kData = BERKGREEN_DATA_DIR;

std::string error_of(auto&& fn) {
    try {
        fn();
    } catch (const InputError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Io, LoadsBundledSpaces) {
    for (const char* name : {"segment.json", "circle.json", "tree.json"}) {
        const MetricSpace s = load_space(kData / name);
        EXPECT_GT(s.graph().total_length(), 0.0) << name;
    }
    const MetricSpace tree = load_space(kData / "tree.json");
    EXPECT_EQ(tree.type(tree.graph().vertex_point("p1")), PointType::I);
    EXPECT_NEAR(tree.graph().total_length(), 1.0 + 2.0 + 1.5 + 0.5 + 0.75 + 1.0 + 0.5, 1e-15);
}

TEST(Io, SpaceRoundTrip) {
    const std::string text = read_file(kData / "tree.json");
    const SpaceDescription d = parse_space_description(text);
    const SpaceDescription again = parse_space_description(to_json(d));
    EXPECT_EQ(to_json(d), to_json(again));
    EXPECT_EQ(d.vertices.size(), 3u);
    EXPECT_EQ(d.edges.size(), 4u);
    ASSERT_EQ(d.trees.size(), 1u);
    EXPECT_EQ(d.trees[0].attach, "b");
}

TEST(Io, MeasureRoundTrip) {
    const MetricSpace s = load_space(kData / "tree.json");
    const SignedMeasure m = load_measure(kData / "tree_measure.json", s.graph());
    EXPECT_NEAR(m.total_mass(), 1.0, 1e-15);
    EXPECT_EQ(parse_measure(to_json(m, s.graph()), s.graph()), m);
    const MetricSpace circle = load_space(kData / "circle.json");
    EXPECT_NEAR(load_measure(kData / "haar_circle.json", circle.graph()).total_mass(), 1.0, 1e-15);
}

TEST(Io, Points) {
    const MetricSpace s = load_space(kData / "segment.json");
    const auto& g = s.graph();
    EXPECT_EQ(parse_point("v1", g), g.vertex_point("v1"));
    EXPECT_EQ(parse_point("e@0.5", g), g.point(0, 0.5));
    EXPECT_EQ(parse_point("e@2", g), g.vertex_point("v1"));
    EXPECT_THROW(parse_point("x", g), InputError);
    EXPECT_THROW(parse_point("e@3", g), InputError);
    EXPECT_THROW(parse_point("e@abc", g), InputError);
}

TEST(Io, Regions) {
    const MetricSpace s = load_space(kData / "segment.json");
    const Region tail = parse_region(read_file(kData / "region_tail.json"), s.graph());
    ASSERT_EQ(tail.segments.size(), 1u);
    EXPECT_DOUBLE_EQ(tail.segments[0].from, 1.5);
    const Region point = parse_region(read_file(kData / "region_point.json"), s.graph());
    ASSERT_EQ(point.points.size(), 1u);
    EXPECT_THROW(parse_region(R"({"segments": [{"edge": "e", "from": 1.0, "to": 0.5}]})", s.graph()), InputError);
}

TEST(Io, Configurations) {
    const EllipticModel circle = build_elliptic(Reduction::Multiplicative, 3.0);
    const auto pts = parse_configuration(read_file(kData / "points_circle.json"), circle);
    ASSERT_EQ(pts.size(), 4u);
    EXPECT_EQ(pts[1], circle.arc_point(0.75));
    const EllipticModel good = build_elliptic(Reduction::Good, 0.0, parse_trees(read_file(kData / "good_trees.json")));
    EXPECT_EQ(parse_configuration(read_file(kData / "points_good.json"), good).size(), 2u);
}

TEST(Io, SyntaxErrorsCarryLineAndColumn) {
    const std::string msg = error_of([] { parse_space("{\n  \"vertices\": [\n    {\"id\": \"a\",, }\n  ]\n}"); });
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column"), std::string::npos) << msg;
}

TEST(Io, SemanticErrorsNameTheField) {
    const std::string text = R"({
  "vertices": [{"id": "a"}, {"id": "b"}],
  "edges": [{"id": "e", "u": "a", "v": "b", "length": -1}]
})";
    const std::string msg = error_of([&] { parse_space(text); });
    EXPECT_NE(msg.find("length"), std::string::npos) << msg;
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;

    const std::string unknown = error_of([] { parse_space(R"({"vertices": [{"id": "a"}], "edges": [], "colour": 1})"); });
    EXPECT_NE(unknown.find("colour"), std::string::npos) << unknown;

    const std::string missing = error_of([] { parse_space(R"({"vertices": [{"id": "a"}, {"id": "b"}], "edges": [{"id": "e", "u": "a", "v": "z", "length": 1}]})"); });
    EXPECT_NE(missing.find("'z'"), std::string::npos) << missing;
}

TEST(Io, MeasureErrors) {
    const MetricSpace s = load_space(kData / "segment.json");
    EXPECT_THROW(parse_measure(R"({"atoms": [{"point": {"vertex": "q"}, "weight": 1}]})", s.graph()), InputError);
    EXPECT_THROW(parse_measure(R"({"densities": [{"edge": "e", "from": 0, "to": 3, "density": 1}]})", s.graph()), InputError);
    EXPECT_THROW(parse_measure(R"({"atoms": [{"point": {"vertex": "v0"}, "mass": 1}]})", s.graph()), InputError);
}

TEST(Io, MissingFile) {
    EXPECT_THROW(read_file(kData / "does_not_exist.json"), InputError);
}
