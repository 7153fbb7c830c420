#include <benchmark/benchmark.h>

#include <random>

#include "berkgreen/elliptic.hpp"
#include "berkgreen/kernel.hpp"
#include "berkgreen/minimization.hpp"

using namespace berkgreen;

namespace {

// A ladder of n rungs: 2n vertices, 3n - 2 edges.
MetricSpace ladder(int n) {
    SpaceDescription d;
    for (int i = 0; i < n; ++i) {
        d.vertices.push_back({"l" + std::to_string(i), PointType::II});
        d.vertices.push_back({"r" + std::to_string(i), PointType::II});
    }
    for (int i = 0; i < n; ++i) {
        const std::string s = std::to_string(i);
        d.edges.push_back({"rung" + s, "l" + s, "r" + s, 1.0 + 0.1 * (i % 3)});
        if (i + 1 < n) {
            const std::string t = std::to_string(i + 1);
            d.edges.push_back({"left" + s, "l" + s, "l" + t, 0.5});
            d.edges.push_back({"right" + s, "r" + s, "r" + t, 0.7});
        }
    }
    return MetricSpace(std::move(d));
}

void BM_GraphKernelBuild(benchmark::State& state) {
    const MetricSpace s = ladder(static_cast<int>(state.range(0)));
    const SpacePoint zeta = s.graph().vertex_point("l0");
    for (auto _ : state) benchmark::DoNotOptimize(GraphKernel(s.graph_ptr(), zeta));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GraphKernelBuild)->RangeMultiplier(2)->Range(8, 256)->Complexity();

void BM_KernelEvaluate(benchmark::State& state) {
    const MetricSpace s = ladder(64);
    const KernelHandle k(s, s.graph().vertex_point("l0"));
    std::mt19937_64 rng(1);
    std::vector<SpacePoint> pts;
    for (int i = 0; i < 256; ++i) {
        const int e = static_cast<int>(rng() % s.graph().edge_count());
        pts.push_back(s.graph().point(e, s.graph().edge(e).length * 0.37));
    }
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(k(pts[i % pts.size()], pts[(i * 7 + 3) % pts.size()]));
        ++i;
    }
}
BENCHMARK(BM_KernelEvaluate);

void BM_EnergyGram(benchmark::State& state) {
    const EllipticModel circle = build_elliptic(Reduction::Multiplicative, 3.0);
    const GreenFunction g = elliptic_green(circle);
    const double h = 3.0 / static_cast<double>(state.range(0));
    const std::vector<SpacePoint> mesh = energy_mesh(g, h);
    for (auto _ : state) benchmark::DoNotOptimize(energy_qp(g, mesh));
    state.counters["mesh"] = static_cast<double>(mesh.size());
}
BENCHMARK(BM_EnergyGram)->Arg(100)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SimplexSolve(benchmark::State& state) {
    const EllipticModel circle = build_elliptic(Reduction::Multiplicative, 3.0);
    const GreenFunction g = elliptic_green(circle);
    const SimplexQP qp = energy_qp(g, energy_mesh(g, 3.0 / static_cast<double>(state.range(0))));
    SolverOptions opts;
    opts.solver = state.range(1) == 0 ? Solver::FrankWolfe : Solver::ProjectedGradient;
    for (auto _ : state) benchmark::DoNotOptimize(minimize_on_simplex(qp.gram, opts));
    state.SetLabel(std::string(to_string(opts.solver)));
}
BENCHMARK(BM_SimplexSolve)->Args({100, 0})->Args({100, 1})->Args({300, 0})->Args({300, 1})->Unit(benchmark::kMillisecond);

void BM_LocalDiscrepancy(benchmark::State& state) {
    const EllipticModel circle = build_elliptic(Reduction::Multiplicative, 3.0);
    const GreenFunction g = elliptic_green(circle);
    const auto n = static_cast<std::size_t>(state.range(0));
    const std::vector<SpacePoint> z = generate_points(circle, Generator::parse("random_uniform"), n, 42);
    for (auto _ : state) benchmark::DoNotOptimize(local_discrepancy(circle, g, z));
}
BENCHMARK(BM_LocalDiscrepancy)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
