#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace {

const std::string kData = BERKGREEN_DATA_DIR;

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

Invocation run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = berkgreen::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const char* name) { return kData + "/" + name; }

double field(const std::string& text, const std::string& key) {
    const auto at = text.find(key + ": ");
    if (at == std::string::npos) return std::nan("");
    return std::stod(text.substr(at + key.size() + 2));
}

}  // namespace

TEST(Cli, KernelOnSegment) {
    const Invocation r = run({"kernel", "--space", data("segment.json"), "--zeta", "v0", "--x", "v1", "--y", "v1"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "2\n");
    const Invocation table = run({"kernel", "--space", data("segment.json"), "--zeta", "v0", "--y", "e@1"});
    EXPECT_EQ(table.code, 0) << table.err;
    EXPECT_NE(table.out.find("e"), std::string::npos);
}

TEST(Cli, KernelBaseChangeCheck) {
    const Invocation r = run({"kernel", "--space", data("tree.json"), "--zeta", "a", "--x", "c", "--y", "w", "--check", "base-change",
                       "--zeta-prime", "bc@0.5"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_LE(std::stod(r.out), 1e-9);
}

TEST(Cli, EnergyOfHaarIsZero) {
    const Invocation r = run({"energy", "--space", data("circle.json"), "--mu", data("haar_circle.json"), "--nu",
                       data("haar_circle.json"), "--format", "json"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("\"value\""), std::string::npos);
    EXPECT_NE(r.out.find("\"off_diagonal\""), std::string::npos);
}

TEST(Cli, CapacityOfPoint) {
    const Invocation r = run({"capacity", "--space", data("segment.json"), "--zeta0", "v0", "--zeta", "v0", "--region",
                       data("region_point.json"), "--format", "json"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("\"capacity\": 0.135335283237"), std::string::npos) << r.out;
}

TEST(Cli, CapacityRejectsZetaInRegion) {
    const Invocation r = run({"capacity", "--space", data("segment.json"), "--zeta", "e@1.75", "--region", data("region_tail.json")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("error"), std::string::npos);
}

TEST(Cli, MinimizeStrictNonConvergence) {
    const std::vector<std::string> base{"minimize", "--space", data("circle.json"), "--mu", data("haar_circle.json"), "--h", "0.1"};
    EXPECT_EQ(run(base).code, 0);
    std::vector<std::string> strict = base;
    strict.insert(strict.begin(), "--strict");
    for (const char* a : {"--max-iter", "3", "--no-polish"}) strict.emplace_back(a);
    EXPECT_EQ(run(strict).code, 1);
}

TEST(Cli, DiscrepancyExamples) {
    const Invocation circle = run({"discrepancy", "--reduction", "multiplicative", "--log-abs-j", "3", "--points", data("points_circle.json")});
    EXPECT_EQ(circle.code, 0) << circle.err;
    EXPECT_NEAR(field(circle.out, "D"), 3.0 / (12 * 16), 1e-12);
    const Invocation good = run({"discrepancy", "--reduction", "good", "--log-abs-j", "0", "--trees", data("good_trees.json"), "--points",
                          data("points_good.json")});
    EXPECT_EQ(good.code, 0) << good.err;
    EXPECT_NEAR(field(good.out, "D"), 0.4, 1e-12);
}

TEST(Cli, EquidistIsDeterministicAndWritesFiles) {
    const std::vector<std::string> args{"equidist", "--generator", "random_uniform", "--n", "4,8,16", "--seed", "9"};
    const Invocation a = run(args);
    const Invocation b = run(args);
    EXPECT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out.substr(0, a.out.find('\n')), "n,D,BL,seed,h");

    const auto path = std::filesystem::temp_directory_path() / "berkgreen_cli_trace.csv";
    std::vector<std::string> to_file{"--out", path.string()};
    to_file.insert(to_file.end(), args.begin(), args.end());
    const Invocation c = run(to_file);
    EXPECT_EQ(c.code, 0) << c.err;
    EXPECT_TRUE(c.out.empty());
    std::ifstream in(path);
    std::stringstream content;
    content << in.rdbuf();
    EXPECT_EQ(content.str(), a.out);
    std::filesystem::remove(path);
}

TEST(Cli, ThreadCountDoesNotChangeResults) {
    const std::vector<std::string> args{"minimize", "--space", data("tree.json"), "--mu", data("tree_measure.json"), "--h", "0.2"};
    std::vector<std::string> one{"--threads", "1"};
    one.insert(one.end(), args.begin(), args.end());
    std::vector<std::string> four{"--threads", "4"};
    four.insert(four.end(), args.begin(), args.end());
    const Invocation a = run(one);
    const Invocation b = run(four);
    EXPECT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, Check) {
    const Invocation r = run({"--strict", "check", "--space", data("tree.json"), "--samples", "50"});
    EXPECT_EQ(r.code, 0) << r.err << r.out;
}

TEST(Cli, InputErrors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"kernel", "--space", data("segment.json"), "--zeta", "v0"}).code, 2);
    EXPECT_EQ(run({"kernel", "--space", data("missing.json"), "--zeta", "v0", "--y", "v1"}).code, 2);
    const Invocation bad_point = run({"kernel", "--space", data("segment.json"), "--zeta", "nowhere", "--y", "v1"});
    EXPECT_EQ(bad_point.code, 2);
    EXPECT_NE(bad_point.err.find("nowhere"), std::string::npos) << bad_point.err;
    EXPECT_EQ(run({"discrepancy", "--reduction", "multiplicative", "--log-abs-j", "-1", "--points", data("points_circle.json")}).code, 2);
    EXPECT_EQ(run({"green", "--space", data("tree.json"), "--mu", data("tree_measure.json"), "--x", "p1", "--y", "p1", "--zeta0", "p1"}).code,
              2);
}

TEST(Cli, Help) {
    const Invocation r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("capacity"), std::string::npos);
}
