#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "berkgreen/elliptic.hpp"
#include "berkgreen/green.hpp"
#include "berkgreen/io.hpp"
#include "berkgreen/kernel.hpp"
#include "berkgreen/minimization.hpp"
#include "berkgreen/paf.hpp"
#include "berkgreen/parallel.hpp"
#include "berkgreen/report.hpp"

namespace berkgreen::cli {

namespace {

struct Global {
    std::string format;
    std::string out_path;
    std::size_t threads = 0;
    bool strict = false;
};

struct Options {
    std::string space, mu, nu, region, points, trees;
    std::string zeta, zeta0, zeta_prime, x, y, check;
    double h = 0.0;
    double mesh_h = 0.01;
    std::string solver = "frank-wolfe";
    double tol = 1e-8;
    std::size_t max_iter = 100000;
    bool no_polish = false;
    std::string reduction = "multiplicative";
    double log_abs_j = 3.0;
    std::string generator = "equispaced";
    std::vector<std::size_t> n_values = {4, 8, 16, 32, 64, 128};
    std::uint64_t seed = 42;
    double width = 0.01;
    std::size_t samples = 200;
};

std::string scalar(std::string_view key, double value, Format format) {
    if (format == Format::Text) return format_number(value) + "\n";
    return emit(Record{{std::string(key), value}}, format);
}

SpacePoint default_base(const MetricSpace& space) { return space.point(space.description().vertices.front().id); }

SpacePoint point_or(const std::string& text, const MetricSpace& space, const SpacePoint& fallback) {
    return text.empty() ? fallback : parse_point(text, space.graph());
}

SolverOptions solver_options(const Options& o) {
    SolverOptions s;
    s.solver = parse_solver(o.solver);
    s.tol = o.tol;
    s.max_iter = o.max_iter;
    s.polish = !o.no_polish;
    return s;
}

/// Breakpoints of the kernel solve in the coordinates of the original edges.
std::string kernel_table(const MetricSpace& space, const SpacePoint& zeta, const SpacePoint& y, Format format) {
    const MetricGraph& g = space.graph();
    const KernelSolve solve = solve_graph_kernel(space.graph_ptr(), zeta, y);
    struct Row {
        std::string edge;
        double offset;
        double value;
    };
    std::vector<Row> rows;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const int ei = static_cast<int>(e);
        std::vector<double> at = {0.0, g.edge(ei).length};
        for (const SpacePoint& p : {zeta, y})
            if (!p.is_vertex() && p.edge() == ei) at.push_back(p.offset());
        std::sort(at.begin(), at.end());
        for (double s : at) rows.push_back({g.edge(ei).id, s, solve.at(g.point(ei, s))});
    }
    std::ostringstream out;
    if (format == Format::Json) {
        out << "{\n  \"breakpoints\": [";
        for (std::size_t i = 0; i < rows.size(); ++i)
            out << (i ? "," : "") << "\n    {\"edge\": \"" << rows[i].edge << "\", \"offset\": " << format_number(rows[i].offset)
                << ", \"value\": " << format_number(rows[i].value) << "}";
        out << "\n  ]\n}\n";
    } else {
        const char sep = format == Format::Csv ? ',' : ' ';
        out << "edge" << sep << "offset" << sep << "value\n";
        for (const Row& r : rows) out << r.edge << sep << format_number(r.offset) << sep << format_number(r.value) << "\n";
    }
    return out.str();
}

struct Result {
    std::string text;
    int code = kOk;
};

Result cmd_kernel(const Options& o, Format f) {
    const MetricSpace space = load_space(o.space);
    const SpacePoint zeta = parse_point(o.zeta, space.graph());
    const SpacePoint y = parse_point(o.y, space.graph());
    if (!o.check.empty()) {
        if (o.check != "base-change") throw InputError("--check: unknown check '" + o.check + "' (expected base-change)");
        if (o.zeta_prime.empty() || o.x.empty()) throw InputError("--check base-change needs --zeta-prime and --x");
        const SpacePoint zp = parse_point(o.zeta_prime, space.graph());
        return {scalar("residual", base_change_residual(space, zeta, zp, parse_point(o.x, space.graph()), y), f)};
    }
    if (!o.x.empty()) return {scalar("value", KernelHandle(space, zeta)(parse_point(o.x, space.graph()), y), f)};
    return {kernel_table(space, zeta, y, f)};
}

Result cmd_green(const Options& o, Format f) {
    const MetricSpace space = load_space(o.space);
    const SignedMeasure mu = load_measure(o.mu, space.graph());
    const GreenFunction g = GreenFunction::build(space, mu, point_or(o.zeta0, space, default_base(space)), o.h);
    return {scalar("value", g(parse_point(o.x, space.graph()), parse_point(o.y, space.graph())), f)};
}

Result cmd_energy(const Options& o, Format f) {
    const MetricSpace space = load_space(o.space);
    const SignedMeasure mu = load_measure(o.mu, space.graph());
    const SignedMeasure nu = load_measure(o.nu, space.graph());
    const GreenFunction g = GreenFunction::build(space, mu, point_or(o.zeta0, space, default_base(space)), o.h);
    return {emit(to_record(energy(g, nu)), f)};
}

Result finish(const EquilibriumResult& r, const MetricGraph& graph, Format f, bool strict) {
    return {emit(r, graph, f), strict && !r.converged ? kNumerical : kOk};
}

Result cmd_minimize(const Options& o, Format f, bool strict) {
    const MetricSpace space = load_space(o.space);
    const SignedMeasure mu = load_measure(o.mu, space.graph());
    const GreenFunction g = GreenFunction::build(space, mu, point_or(o.zeta0, space, default_base(space)));
    return finish(minimize_energy(g, o.mesh_h, solver_options(o)), space.graph(), f, strict);
}

Result cmd_capacity(const Options& o, Format f, bool strict) {
    const MetricSpace space = load_space(o.space);
    const Region region = [&] {
        try {
            return parse_region(read_file(o.region), space.graph());
        } catch (const InputError& e) {
            throw InputError(o.region + ": " + e.what());
        }
    }();
    const KernelHandle k(space, point_or(o.zeta0, space, default_base(space)));
    return finish(capacity(k, parse_point(o.zeta, space.graph()), region, o.mesh_h, solver_options(o)), space.graph(), f,
                  strict);
}

EllipticModel model_from(const Options& o) {
    std::vector<TreeDescription> trees;
    if (!o.trees.empty()) {
        try {
            trees = parse_trees(read_file(o.trees));
        } catch (const InputError& e) {
            throw InputError(o.trees + ": " + e.what());
        }
    }
    return build_elliptic(parse_reduction(o.reduction), o.log_abs_j, std::move(trees));
}

std::vector<SpacePoint> configuration(const Options& o, const EllipticModel& model) {
    try {
        return parse_configuration(read_file(o.points), model);
    } catch (const InputError& e) {
        throw InputError(o.points + ": " + e.what());
    }
}

Result cmd_discrepancy(const Options& o, Format f) {
    const EllipticModel model = model_from(o);
    const std::vector<SpacePoint> pts = configuration(o, model);
    const double d = local_discrepancy(model, elliptic_green(model, o.h), pts);
    return {emit(Record{{"n", static_cast<long long>(pts.size())}, {"D", d}}, f)};
}

Result cmd_equidist(const Options& o, Format f) {
    const EllipticModel model = model_from(o);
    Generator gen = Generator::parse(o.generator, o.width);
    if (gen.kind == Generator::Kind::Custom) {
        if (o.points.empty()) throw InputError("--generator custom needs --points");
        gen.custom = configuration(o, model);
    }
    return {emit(equidistribution_experiment(model, gen, o.n_values, o.seed, o.h), f)};
}

/// Max residuals of the kernel invariants over random points of a space.
Result cmd_check(const Options& o, Format f, bool strict) {
    const MetricSpace space = load_space(o.space);
    const MetricGraph& g = space.graph();
    std::mt19937_64 rng(o.seed);
    auto any_point = [&](bool type_one) {
        for (;;) {
            SpacePoint p;
            if (std::bernoulli_distribution(0.3)(rng)) {
                p = SpacePoint::at_vertex(std::uniform_int_distribution<int>(0, static_cast<int>(g.vertex_count()) - 1)(rng));
            } else {
                const int e = std::uniform_int_distribution<int>(0, static_cast<int>(g.edge_count()) - 1)(rng);
                p = g.point(e, std::uniform_real_distribution<double>(0.0, 1.0)(rng) * g.edge(e).length);
            }
            if (type_one || g.type_of(p) != PointType::I) return p;
        }
    };
    double symmetry = 0.0;
    double base_change = 0.0;
    double laplacian_error = 0.0;
    for (std::size_t s = 0; s < o.samples && g.edge_count() > 0; ++s) {
        const SpacePoint zeta = any_point(false);
        const SpacePoint zeta2 = any_point(false);
        const SpacePoint x = any_point(true);
        SpacePoint y = any_point(true);
        if (x == y && g.type_of(x) == PointType::I) y = zeta2;
        const KernelHandle k(space, zeta);
        const KernelHandle k2(space, zeta2);
        symmetry = std::max(symmetry, std::abs(k(x, y) - k(y, x)));
        base_change = std::max(base_change, base_change_residual(k, k2, x, y));
        const KernelSolve solve = solve_graph_kernel(space.graph_ptr(), zeta, y);
        const SignedMeasure expect = SignedMeasure::dirac(solve.refinement->map(zeta)) - SignedMeasure::dirac(solve.refinement->map(y));
        const SignedMeasure diff = (laplacian(solve.values) - expect).merged();
        for (const Atom& a : diff.atoms()) laplacian_error = std::max(laplacian_error, std::abs(a.weight));
    }
    const Record rec{{"samples", static_cast<long long>(o.samples)},
                     {"symmetry", symmetry},
                     {"base_change", base_change},
                     {"laplacian", laplacian_error}};
    const bool bad = std::max({symmetry, base_change, laplacian_error}) > 1e-9;
    return {emit(rec, f), strict && bad ? kNumerical : kOk};
}

void add_space(CLI::App* sub, Options& o) {
    sub->add_option("--space", o.space, "space description file (JSON)")->required()->check(CLI::ExistingFile);
}

void add_solver(CLI::App* sub, Options& o) {
    sub->add_option("--h", o.mesh_h, "mesh spacing")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--solver", o.solver, "frank-wolfe or projected-gradient")
        ->check(CLI::IsMember({"frank-wolfe", "frank_wolfe", "projected-gradient", "projected_gradient"}))
        ->capture_default_str();
    sub->add_option("--tol", o.tol, "duality-gap tolerance")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--max-iter", o.max_iter, "iteration limit")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_flag("--no-polish", o.no_polish, "skip the final active-set solve on the support");
}

void add_elliptic(CLI::App* sub, Options& o) {
    sub->add_option("--reduction", o.reduction, "good or multiplicative")
        ->check(CLI::IsMember({"good", "multiplicative"}))
        ->capture_default_str();
    sub->add_option("--log-abs-j", o.log_abs_j, "log|j| of the curve")->capture_default_str();
    sub->add_option("--trees", o.trees, "hanging trees file (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--h", o.h, "Green quadrature scale, 0 for closed form")->check(CLI::NonNegativeNumber)->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Potential theory on metric graphs: kernels, Green functions, energies, capacity, discrepancy.", "berkgreen"};
    app.set_help_flag("--help", "print this help message and exit");
    app.require_subcommand(1);
    Global global;
    Options o;
    app.add_option("--format", global.format, "text, json or csv")->check(CLI::IsMember({"text", "json", "csv"}));
    app.add_option("--out", global.out_path, "write the result to this file");
    app.add_option("--threads", global.threads, "worker threads (BERKGREEN_THREADS takes precedence)")
        ->check(CLI::PositiveNumber);
    app.add_flag("--strict", global.strict, "exit 1 when a solver does not converge or a check fails");
    app.fallthrough();

    auto* kernel = app.add_subcommand("kernel", "potential kernel g_zeta(x, y) or its breakpoint table in x");
    add_space(kernel, o);
    kernel->add_option("--zeta", o.zeta, "pole at which the kernel vanishes")->required();
    kernel->add_option("--y", o.y, "second argument")->required();
    kernel->add_option("--x", o.x, "first argument; without it the whole function of x is printed");
    kernel->add_option("--check", o.check, "base-change: residual of the change-of-pole identity");
    kernel->add_option("--zeta-prime", o.zeta_prime, "second pole for --check base-change");

    auto* green = app.add_subcommand("green", "Arakelov-Green function g_mu(x, y)");
    add_space(green, o);
    green->add_option("--mu", o.mu, "probability measure file (JSON)")->required()->check(CLI::ExistingFile);
    green->add_option("--x", o.x)->required();
    green->add_option("--y", o.y)->required();
    green->add_option("--zeta0", o.zeta0, "base point (default: first skeleton vertex)");
    green->add_option("--h", o.h, "quadrature scale, 0 for closed form")->check(CLI::NonNegativeNumber)->capture_default_str();

    auto* en = app.add_subcommand("energy", "mu-energy of nu");
    add_space(en, o);
    en->add_option("--mu", o.mu)->required()->check(CLI::ExistingFile);
    en->add_option("--nu", o.nu)->required()->check(CLI::ExistingFile);
    en->add_option("--zeta0", o.zeta0, "base point (default: first skeleton vertex)");
    en->add_option("--h", o.h, "quadrature scale, 0 for closed form")->check(CLI::NonNegativeNumber)->capture_default_str();

    auto* minimize = app.add_subcommand("minimize", "minimize the mu-energy over probability measures on a mesh");
    add_space(minimize, o);
    minimize->add_option("--mu", o.mu)->required()->check(CLI::ExistingFile);
    minimize->add_option("--zeta0", o.zeta0, "base point (default: first skeleton vertex)");
    add_solver(minimize, o);

    auto* cap = app.add_subcommand("capacity", "capacity of a region relative to zeta");
    add_space(cap, o);
    cap->add_option("--zeta0", o.zeta0, "kernel base point (default: first skeleton vertex)");
    cap->add_option("--zeta", o.zeta, "external point")->required();
    cap->add_option("--region", o.region, "region file (JSON)")->required()->check(CLI::ExistingFile);
    add_solver(cap, o);

    auto* disc = app.add_subcommand("discrepancy", "local discrepancy D(Z) of a point configuration");
    add_elliptic(disc, o);
    disc->add_option("--points", o.points, "points file (JSON)")->required()->check(CLI::ExistingFile);

    auto* equi = app.add_subcommand("equidist", "discrepancy and bounded-Lipschitz trace of a point sequence");
    add_elliptic(equi, o);
    equi->add_option("--generator", o.generator, "equispaced, random_uniform, clustered or custom")->capture_default_str();
    equi->add_option("--n", o.n_values, "comma-separated sizes")->delimiter(',')->check(CLI::PositiveNumber);
    equi->add_option("--seed", o.seed)->capture_default_str();
    equi->add_option("--width", o.width, "cluster width as a fraction of L")->capture_default_str();
    equi->add_option("--points", o.points, "points file for the custom generator")->check(CLI::ExistingFile);

    auto* check = app.add_subcommand("check", "max residuals of symmetry, base change and Laplacian exactness");
    add_space(check, o);
    check->add_option("--seed", o.seed)->capture_default_str();
    check->add_option("--samples", o.samples)->check(CLI::PositiveNumber)->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInput;
    }

    if (std::getenv("BERKGREEN_THREADS") == nullptr && global.threads > 0) set_thread_count(global.threads);

    try {
        Format f = equi->parsed() ? Format::Csv : Format::Text;
        if (!global.format.empty()) f = parse_format(global.format);
        Result r;
        if (kernel->parsed()) r = cmd_kernel(o, f);
        else if (green->parsed()) r = cmd_green(o, f);
        else if (en->parsed()) r = cmd_energy(o, f);
        else if (minimize->parsed()) r = cmd_minimize(o, f, global.strict);
        else if (cap->parsed()) r = cmd_capacity(o, f, global.strict);
        else if (disc->parsed()) r = cmd_discrepancy(o, f);
        else if (equi->parsed()) r = cmd_equidist(o, f);
        else r = cmd_check(o, f, global.strict);

        if (global.out_path.empty()) {
            out << r.text;
        } else {
            std::ofstream file(global.out_path, std::ios::binary);
            if (!file) throw InputError("--out: cannot write '" + global.out_path + "'");
            file << r.text;
        }
        if (r.code == kNumerical) err << "error: solver did not converge or a check exceeded its tolerance\n";
        return r.code;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kInput;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kNumerical;
    }
}

}  // namespace berkgreen::cli
