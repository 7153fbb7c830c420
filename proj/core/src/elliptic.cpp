#include "berkgreen/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <random>
#include <set>

#include "berkgreen/bl_distance.hpp"
#include "berkgreen/parallel.hpp"

namespace berkgreen {

namespace {

MetricSpace make_space(Reduction reduction, double length, std::vector<TreeDescription> trees) {
    SpaceDescription d;
    if (reduction == Reduction::Good) {
        d.vertices = {{"zeta0", PointType::II}};
    } else {
        d.vertices = {{"a", PointType::II}, {"b", PointType::II}};
        d.edges = {{"arc0", "a", "b", length / 2.0}, {"arc1", "b", "a", length / 2.0}};
    }
    d.trees = std::move(trees);
    return MetricSpace(std::move(d));
}

std::vector<SpacePoint> type_one_leaves(const MetricSpace& space) {
    std::vector<SpacePoint> out;
    const MetricGraph& g = space.graph();
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        const SpacePoint p = SpacePoint::at_vertex(static_cast<int>(v));
        if (g.type_of(p) == PointType::I) out.push_back(p);
    }
    return out;
}

std::seed_seq seed_for(std::uint64_t seed, std::size_t n) {
    return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(static_cast<std::uint64_t>(n) >> 32)};
}

}  // namespace

std::string_view to_string(Reduction reduction) { return reduction == Reduction::Good ? "good" : "multiplicative"; }

Reduction parse_reduction(std::string_view text) {
    if (text == "good") return Reduction::Good;
    if (text == "multiplicative") return Reduction::Multiplicative;
    throw InputError("unknown reduction '" + std::string(text) + "' (expected good or multiplicative)");
}

SpacePoint EllipticModel::arc_point(double s) const {
    if (reduction != Reduction::Multiplicative) throw InputError("arc positions exist only for multiplicative reduction");
    const double length = circumference();
    s = std::fmod(s, length);
    if (s < 0.0) s += length;
    const MetricGraph& g = space.graph();
    if (s < length / 2.0) return g.point("arc0", s);
    return g.point("arc1", std::min(s - length / 2.0, length / 2.0));
}

EllipticModel build_elliptic(Reduction reduction, double log_abs_j, std::vector<TreeDescription> trees) {
    if (!std::isfinite(log_abs_j)) throw InputError("log_abs_j must be finite");
    if (reduction == Reduction::Multiplicative && !(log_abs_j > 0.0))
        throw InputError("multiplicative reduction needs log_abs_j > 0");
    MetricSpace space = make_space(reduction, log_abs_j, std::move(trees));
    const MetricGraph& g = space.graph();
    SignedMeasure mu;
    SpacePoint base;
    if (reduction == Reduction::Good) {
        base = g.vertex_point("zeta0");
        mu = SignedMeasure::dirac(base);
    } else {
        base = g.vertex_point("a");
        const double density = 1.0 / log_abs_j;
        const int arc0 = g.edge_index("arc0");
        const int arc1 = g.edge_index("arc1");
        mu = SignedMeasure({}, {{arc0, 0.0, log_abs_j / 2.0, density}, {arc1, 0.0, log_abs_j / 2.0, density}});
    }
    return EllipticModel{reduction, log_abs_j, std::move(space), std::move(mu), base};
}

GreenFunction elliptic_green(const EllipticModel& model, double h) {
    return GreenFunction::build(model.space, model.mu, model.base, h);
}

double local_discrepancy(const EllipticModel& model, std::span<const SpacePoint> points) {
    return local_discrepancy(model, elliptic_green(model), points);
}

double local_discrepancy(const EllipticModel& model, const GreenFunction& g, std::span<const SpacePoint> points) {
    const std::size_t n = points.size();
    if (n == 0) throw InputError("local discrepancy needs at least one point");
    const MetricGraph& graph = model.space.graph();
    std::set<SpacePoint> seen;
    for (const SpacePoint& p : points) {
        graph.validate(p);
        if (!seen.insert(p).second) throw InputError("duplicate point " + graph.describe(p) + " in configuration");
    }
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = g.potential_of_mu(points[i]);
    std::vector<double> row(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) s += g.evaluate(points[i], points[j], u[i], u[j]);
        row[i] = s;
    });
    double off = 0.0;
    for (double r : row) off += 2.0 * r;
    const double nn = static_cast<double>(n);
    return (off + nn / 12.0 * model.circumference()) / (nn * nn);
}

Generator Generator::parse(std::string_view name, double width) {
    Generator g;
    g.width = width;
    if (name == "equispaced") g.kind = Kind::Equispaced;
    else if (name == "random_uniform" || name == "random-uniform" || name == "random") g.kind = Kind::RandomUniform;
    else if (name == "clustered") g.kind = Kind::Clustered;
    else if (name == "custom") g.kind = Kind::Custom;
    else throw InputError("unknown generator '" + std::string(name) + "' (expected equispaced, random_uniform, clustered, custom)");
    if (g.kind == Kind::Clustered && !(width > 0.0 && width <= 1.0))
        throw InputError("cluster width must lie in (0, 1] as a fraction of L");
    return g;
}

std::string_view to_string(Generator::Kind kind) {
    switch (kind) {
        case Generator::Kind::Equispaced: return "equispaced";
        case Generator::Kind::RandomUniform: return "random_uniform";
        case Generator::Kind::Clustered: return "clustered";
        case Generator::Kind::Custom: return "custom";
    }
    return "custom";
}

std::vector<SpacePoint> generate_points(const EllipticModel& model, const Generator& generator, std::size_t n,
                                        std::uint64_t seed) {
    if (n == 0) throw InputError("n must be at least 1");
    if (generator.kind == Generator::Kind::Custom) {
        if (generator.custom.size() < n) throw InputError("custom sequence has fewer than n points");
        return {generator.custom.begin(), generator.custom.begin() + static_cast<std::ptrdiff_t>(n)};
    }
    auto seq = seed_for(seed, n);
    std::mt19937_64 rng(seq);

    if (model.reduction == Reduction::Good) {
        if (generator.kind != Generator::Kind::RandomUniform)
            throw InputError("good reduction supports only the random_uniform and custom generators");
        std::vector<SpacePoint> leaves = type_one_leaves(model.space);
        if (leaves.size() < n) throw InputError("good-reduction model has fewer type-I leaves than n");
        std::shuffle(leaves.begin(), leaves.end(), rng);
        leaves.resize(n);
        return leaves;
    }

    const double length = model.circumference();
    if (generator.kind == Generator::Kind::Equispaced) {
        std::vector<SpacePoint> out;
        for (std::size_t i = 0; i < n; ++i) out.push_back(model.arc_point(length * static_cast<double>(i) / static_cast<double>(n)));
        return out;
    }
    const double span = generator.kind == Generator::Kind::Clustered ? generator.width * length : length;
    std::uniform_real_distribution<double> draw(0.0, span);
    std::vector<SpacePoint> out;
    std::set<SpacePoint> seen;
    int retries = 0;
    while (out.size() < n) {
        const SpacePoint p = model.arc_point(draw(rng));
        if (seen.insert(p).second) {
            out.push_back(p);
        } else if (++retries > 100) {
            throw StructuralError("point generator collided more than 100 times");
        }
    }
    return out;
}

DiscrepancyTrace equidistribution_experiment(const EllipticModel& model, const Generator& generator,
                                             std::span<const std::size_t> n_values, std::uint64_t seed, double h) {
    const GreenFunction g = elliptic_green(model, h);
    const TestDictionary dictionary(model.space);
    DiscrepancyTrace trace;
    trace.seed = seed;
    trace.h = h;
    trace.generator = generator.kind;
    trace.bl_resolution = dictionary.resolution();
    trace.records.resize(n_values.size());
    for (std::size_t k = 0; k < n_values.size(); ++k) {
        const std::size_t n = n_values[k];
        const std::vector<SpacePoint> points = generate_points(model, generator, n, seed);
        std::vector<Atom> atoms;
        for (const SpacePoint& p : points) atoms.push_back({p, 1.0 / static_cast<double>(n)});
        trace.records[k] = {n, local_discrepancy(model, g, points), dictionary.distance(SignedMeasure(std::move(atoms)), model.mu)};
    }
    return trace;
}

void write_csv(std::ostream& out, const DiscrepancyTrace& trace) {
    char buf[160];
    out << "n,D,BL,seed,h\n";
    for (const auto& r : trace.records) {
        std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g,%llu,%.12g\n", r.n, r.discrepancy, r.bl,
                      static_cast<unsigned long long>(trace.seed), trace.h);
        out << buf;
    }
}

}  // namespace berkgreen
