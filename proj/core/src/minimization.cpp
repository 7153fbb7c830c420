#include "berkgreen/minimization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "berkgreen/parallel.hpp"

namespace berkgreen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::Index argmin_lowest(const Eigen::VectorXd& v) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (v(i) < v(best)) best = i;
    return best;
}

/// Sort-based Euclidean projection onto the probability simplex.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& y) {
    std::vector<double> u(y.data(), y.data() + y.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cumulative += u[j];
        const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) theta = t;
    }
    return (y.array() - theta).max(0.0).matrix();
}

double fw_gap(const Eigen::VectorXd& qw, double f) { return 2.0 * (f - qw.minCoeff()); }

/// Active-set solve of min w^T Q w, sum w = 1, w >= 0 started from the support
/// of `w`. Returns true and overwrites w when it finds a KKT point.
bool polish(const Eigen::MatrixXd& q, Eigen::VectorXd& w, double tol) {
    const Eigen::Index n = q.rows();
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < n; ++i)
        if (w(i) > 0.0) active.push_back(i);
    const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
    for (Eigen::Index round = 0; round < 4 * n + 8; ++round) {
        const auto m = static_cast<Eigen::Index>(active.size());
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) kkt(i, j) = q(active[static_cast<std::size_t>(i)], active[static_cast<std::size_t>(j)]);
            kkt(i, m) = 1.0;
            kkt(m, i) = 1.0;
        }
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
        rhs(m) = 1.0;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
        if (!lu.isInvertible()) return false;
        const Eigen::VectorXd sol = lu.solve(rhs);
        if (!sol.allFinite() || (kkt * sol - rhs).cwiseAbs().maxCoeff() > 1e-9) return false;
        // most negative weight leaves the active set
        Eigen::Index worst = -1;
        for (Eigen::Index i = 0; i < m; ++i)
            if (sol(i) < 0.0 && (worst < 0 || sol(i) < sol(worst))) worst = i;
        if (worst >= 0) {
            if (m == 1) return false;
            active.erase(active.begin() + worst);
            continue;
        }
        Eigen::VectorXd candidate = Eigen::VectorXd::Zero(n);
        for (Eigen::Index i = 0; i < m; ++i) candidate(active[static_cast<std::size_t>(i)]) = sol(i);
        const Eigen::VectorXd qw = q * candidate;
        const double f = candidate.dot(qw);
        // most violated inactive index joins
        const Eigen::Index entering = argmin_lowest(qw);
        if (qw(entering) < f - 1e-12 * scale) {
            if (std::find(active.begin(), active.end(), entering) != active.end()) return false;
            active.insert(std::upper_bound(active.begin(), active.end(), entering), entering);
            continue;
        }
        if (fw_gap(qw, f) > std::max(tol, 1e-12 * scale)) return false;
        w = candidate;
        return true;
    }
    return false;
}

SimplexSolution frank_wolfe(const Eigen::MatrixXd& q, const SolverOptions& opt) {
    const Eigen::Index n = q.rows();
    SimplexSolution out;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    const Eigen::Index start = argmin_lowest(q.diagonal());
    w(start) = 1.0;
    Eigen::VectorXd qw = q.col(start);
    double f = q(start, start);
    for (out.iterations = 0; out.iterations < opt.max_iter; ++out.iterations) {
        const Eigen::Index s = argmin_lowest(qw);
        out.gap = 2.0 * (f - qw(s));
        if (out.gap <= opt.tol) {
            out.converged = true;
            break;
        }
        Eigen::Index a = -1;
        for (Eigen::Index i = 0; i < n; ++i)
            if (w(i) > 0.0 && (a < 0 || qw(i) > qw(a))) a = i;
        const double away_gap = 2.0 * (qw(a) - f);
        double slope;  // d . Qw
        double curvature;  // d . Q d
        double gamma_max;
        const bool toward = out.gap >= away_gap || w(a) >= 1.0;
        if (toward) {
            slope = qw(s) - f;
            curvature = q(s, s) - 2.0 * qw(s) + f;
            gamma_max = 1.0;
        } else {
            slope = f - qw(a);
            curvature = f - 2.0 * qw(a) + q(a, a);
            gamma_max = w(a) / (1.0 - w(a));
        }
        double gamma = curvature > 0.0 ? std::min(gamma_max, -slope / curvature) : gamma_max;
        gamma = std::max(0.0, gamma);
        if (gamma == 0.0) break;
        if (toward) {
            w *= (1.0 - gamma);
            w(s) += gamma;
            qw = (1.0 - gamma) * qw + gamma * q.col(s);
        } else {
            w *= (1.0 + gamma);
            w(a) -= gamma;
            if (gamma == gamma_max) w(a) = 0.0;
            qw = (1.0 + gamma) * qw - gamma * q.col(a);
        }
        f = w.dot(qw);
        if (opt.record_history) out.history.push_back(f);
    }
    out.weights = std::move(w);
    out.value = f;
    return out;
}

SimplexSolution projected_gradient(const Eigen::MatrixXd& q, const SolverOptions& opt) {
    const Eigen::Index n = q.rows();
    SimplexSolution out;
    // curvature along simplex directions: largest eigenvalue of P Q P
    const Eigen::MatrixXd centering = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
    const Eigen::MatrixXd pqp = centering * q * centering;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(pqp, Eigen::EigenvaluesOnly);
    const double lipschitz = 2.0 * std::max(eig.eigenvalues().maxCoeff(), 1e-300);
    const double step = 1.0 / lipschitz;

    Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    Eigen::VectorXd qw = q * w;
    double f = w.dot(qw);
    for (out.iterations = 0; out.iterations < opt.max_iter; ++out.iterations) {
        out.gap = fw_gap(qw, f);
        if (out.gap <= opt.tol) {
            out.converged = true;
            break;
        }
        Eigen::VectorXd next = project_to_simplex(w - step * 2.0 * qw);
        Eigen::VectorXd qn = q * next;
        const double fn = next.dot(qn);
        if (fn > f) break;  // rounding floor reached
        w = std::move(next);
        qw = std::move(qn);
        f = fn;
        if (opt.record_history) out.history.push_back(f);
    }
    out.weights = std::move(w);
    out.value = f;
    return out;
}

Eigen::MatrixXd assemble(std::size_t n, const std::function<double(std::size_t, std::size_t)>& entry) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = i; j < n; ++j) {
            const double v = entry(i, j);
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    });
    return m;
}

EquilibriumResult finish(std::vector<SpacePoint> mesh, const Eigen::MatrixXd& q, const SolverOptions& options,
                         EquilibriumResult::Scope scope, double mesh_h) {
    SimplexSolution sol = minimize_on_simplex(q, options);
    EquilibriumResult r;
    r.mesh = std::move(mesh);
    r.weights.assign(sol.weights.data(), sol.weights.data() + sol.weights.size());
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < r.mesh.size(); ++i)
        if (r.weights[i] > 0.0) atoms.push_back({r.mesh[i], r.weights[i]});
    r.minimizer = SignedMeasure(std::move(atoms));
    const Eigen::VectorXd qw = q * sol.weights;
    r.potential.assign(qw.data(), qw.data() + qw.size());
    r.value = sol.value;
    r.robin_constant = sol.value;
    r.capacity = std::exp(-sol.value);
    r.gap = sol.gap;
    r.iterations = sol.iterations;
    r.converged = sol.converged;
    r.frostman_scope = scope;
    r.mesh_h = mesh_h;
    r.frostman_deviation = frostman_check(r);
    return r;
}

}  // namespace

std::string_view to_string(Solver solver) {
    return solver == Solver::FrankWolfe ? "frank-wolfe" : "projected-gradient";
}

Solver parse_solver(std::string_view text) {
    if (text == "frank-wolfe" || text == "frank_wolfe") return Solver::FrankWolfe;
    if (text == "projected-gradient" || text == "projected_gradient") return Solver::ProjectedGradient;
    throw InputError("unknown solver '" + std::string(text) + "' (expected frank-wolfe or projected-gradient)");
}

SimplexSolution minimize_on_simplex(const Eigen::MatrixXd& q, const SolverOptions& options) {
    if (q.rows() == 0 || q.rows() != q.cols()) throw InputError("simplex QP needs a nonempty square matrix");
    if (!q.allFinite()) throw DomainError("simplex QP matrix has non-finite entries");
    SimplexSolution sol = options.solver == Solver::FrankWolfe ? frank_wolfe(q, options) : projected_gradient(q, options);
    if (options.polish && !sol.converged) {
        Eigen::VectorXd w = sol.weights;
        if (polish(q, w, options.tol)) {
            const Eigen::VectorXd qw = q * w;
            const double f = w.dot(qw);
            if (f <= sol.value) {
                sol.weights = std::move(w);
                sol.value = f;
                sol.gap = std::max(0.0, fw_gap(qw, f));
                sol.converged = sol.gap <= options.tol;
                if (options.record_history) sol.history.push_back(f);
            }
        }
    }
    return sol;
}

std::vector<SpacePoint> energy_mesh(const GreenFunction& g, double mesh_h) {
    const MetricSpace& space = g.space();
    std::vector<SpacePoint> mesh = space.mesh(mesh_h);
    for (const Atom& a : g.mu().atoms())
        if (space.type(a.point) != PointType::I && std::find(mesh.begin(), mesh.end(), a.point) == mesh.end())
            mesh.push_back(a.point);
    return mesh;
}

SimplexQP energy_qp(const GreenFunction& g, std::vector<SpacePoint> mesh) {
    if (mesh.empty()) throw InputError("energy mesh is empty");
    std::vector<double> u(mesh.size());
    parallel_for(mesh.size(), [&](std::size_t i) { u[i] = g.potential_of_mu(mesh[i]); });
    SimplexQP qp;
    qp.gram = assemble(mesh.size(), [&](std::size_t i, std::size_t j) { return g.evaluate(mesh[i], mesh[j], u[i], u[j]); });
    qp.mesh = std::move(mesh);
    return qp;
}

std::vector<double> discretize(const MetricGraph& graph, const SignedMeasure& mu, std::span<const SpacePoint> mesh) {
    std::vector<double> w(mesh.size(), 0.0);
    std::map<SpacePoint, std::size_t> index;
    for (std::size_t i = 0; i < mesh.size(); ++i) index.emplace(mesh[i], i);
    // mesh nodes along each edge, by offset
    std::vector<std::vector<std::pair<double, std::size_t>>> nodes(graph.edge_count());
    for (std::size_t e = 0; e < graph.edge_count(); ++e) {
        const auto& edge = graph.edge(static_cast<int>(e));
        if (auto it = index.find(SpacePoint::at_vertex(edge.u)); it != index.end()) nodes[e].emplace_back(0.0, it->second);
        if (auto it = index.find(SpacePoint::at_vertex(edge.v)); it != index.end()) nodes[e].emplace_back(edge.length, it->second);
    }
    for (std::size_t i = 0; i < mesh.size(); ++i)
        if (!mesh[i].is_vertex()) nodes[static_cast<std::size_t>(mesh[i].edge())].emplace_back(mesh[i].offset(), i);
    for (auto& list : nodes) std::sort(list.begin(), list.end());

    // mass m spread linearly over [a, b] with density d, between neighbouring nodes
    auto spread = [&](int edge, double a, double b, double d) {
        const auto& list = nodes[static_cast<std::size_t>(edge)];
        if (list.empty()) throw InputError("discretize: no mesh point on edge '" + graph.edge(edge).id + "'");
        if (a < list.front().first) {
            const double hi = std::min(b, list.front().first);
            w[list.front().second] += d * (hi - a);
            a = hi;
        }
        if (b > list.back().first) {
            const double lo = std::max(a, list.back().first);
            w[list.back().second] += d * (b - lo);
            b = lo;
        }
        for (std::size_t k = 1; k < list.size() && a < b; ++k) {
            const double lo = std::max(a, list[k - 1].first);
            const double hi = std::min(b, list[k].first);
            if (hi <= lo) continue;
            const double width = list[k].first - list[k - 1].first;
            // integral of the hat at the left node over [lo, hi]
            const double left = d * ((list[k].first - lo) * (list[k].first - lo) - (list[k].first - hi) * (list[k].first - hi)) / (2.0 * width);
            w[list[k - 1].second] += left;
            w[list[k].second] += d * (hi - lo) - left;
        }
    };
    for (const Atom& a : mu.atoms()) {
        if (auto it = index.find(a.point); it != index.end()) {
            w[it->second] += a.weight;
            continue;
        }
        if (a.point.is_vertex()) throw InputError("discretize: atom at " + graph.describe(a.point) + " is not a mesh point");
        const auto& list = nodes[static_cast<std::size_t>(a.point.edge())];
        auto hi = std::lower_bound(list.begin(), list.end(), std::make_pair(a.point.offset(), std::size_t{0}));
        if (hi == list.end()) w[list.back().second] += a.weight;
        else if (hi == list.begin()) w[list.front().second] += a.weight;
        else {
            const auto lo = hi - 1;
            const double t = (a.point.offset() - lo->first) / (hi->first - lo->first);
            w[lo->second] += (1.0 - t) * a.weight;
            w[hi->second] += t * a.weight;
        }
    }
    for (const DensityPiece& p : mu.densities()) spread(p.edge, p.from, p.to, p.density);
    return w;
}

EquilibriumResult minimize_energy(const GreenFunction& g, double mesh_h, const SolverOptions& options) {
    SimplexQP qp = energy_qp(g, energy_mesh(g, mesh_h));
    return finish(std::move(qp.mesh), qp.gram, options, EquilibriumResult::Scope::FullMesh, mesh_h);
}

double robin_constant(const GreenFunction& g, double mesh_h, const SolverOptions& options) {
    return minimize_energy(g, mesh_h, options).value;
}

std::vector<SpacePoint> region_mesh(const MetricGraph& graph, const Region& region, double h, bool include_type_one) {
    if (!(h > 0.0)) throw InputError("mesh spacing h must be positive");
    std::vector<SpacePoint> out;
    auto add = [&](const SpacePoint& p) {
        if (!include_type_one && graph.type_of(p) == PointType::I) return;
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    };
    for (const SpacePoint& p : region.points) {
        graph.validate(p);
        add(p);
    }
    for (const auto& seg : region.segments) {
        if (seg.edge < 0 || static_cast<std::size_t>(seg.edge) >= graph.edge_count())
            throw InputError("region segment references an edge index out of range");
        const double len = graph.edge(seg.edge).length;
        if (!(seg.from >= 0.0 && seg.from <= seg.to && seg.to <= len))
            throw InputError("region segment on edge '" + graph.edge(seg.edge).id + "' needs 0 <= from <= to <= length");
        const auto cells = std::max<long>(1, static_cast<long>(std::ceil((seg.to - seg.from) / h - 1e-12)));
        for (long k = 0; k <= cells; ++k) {
            const double s = k == cells ? seg.to : seg.from + (seg.to - seg.from) * static_cast<double>(k) / static_cast<double>(cells);
            add(graph.point(seg.edge, s));
        }
    }
    return out;
}

bool region_contains(const MetricGraph& graph, const Region& region, const SpacePoint& p) {
    graph.validate(p);
    for (const SpacePoint& q : region.points)
        if (q == p) return true;
    for (const auto& seg : region.segments) {
        const auto& e = graph.edge(seg.edge);
        if (p.is_vertex()) {
            if ((p.vertex() == e.u && seg.from == 0.0) || (p.vertex() == e.v && seg.to == e.length)) return true;
        } else if (p.edge() == seg.edge && p.offset() >= seg.from && p.offset() <= seg.to) {
            return true;
        }
    }
    return false;
}

EquilibriumResult capacity(const KernelHandle& kernel, const SpacePoint& zeta, const Region& region, double mesh_h,
                           const SolverOptions& options) {
    const MetricGraph& graph = kernel.space().graph();
    if (region.points.empty() && region.segments.empty()) throw InputError("capacity: region E is empty");
    if (region_contains(graph, region, zeta))
        throw InputError("capacity: zeta " + graph.describe(zeta) + " lies in the region E");
    std::vector<SpacePoint> mesh = region_mesh(graph, region, mesh_h);
    if (mesh.empty()) {
        // only type-I points: no finite-energy probability measure
        EquilibriumResult r;
        r.mesh = region_mesh(graph, region, mesh_h, true);
        r.value = kInf;
        r.robin_constant = kInf;
        r.capacity = 0.0;
        r.positive_capacity = false;
        r.converged = true;
        r.frostman_scope = EquilibriumResult::Scope::Support;
        r.mesh_h = mesh_h;
        return r;
    }
    std::vector<double> to_zeta(mesh.size());
    parallel_for(mesh.size(), [&](std::size_t i) { to_zeta[i] = kernel(mesh[i], zeta); });
    const Eigen::MatrixXd q = assemble(mesh.size(), [&](std::size_t i, std::size_t j) {
        return kernel(mesh[i], mesh[j]) - to_zeta[i] - to_zeta[j];
    });
    EquilibriumResult r = finish(std::move(mesh), q, options, EquilibriumResult::Scope::Support, mesh_h);
    r.positive_capacity = std::isfinite(r.value);
    return r;
}

double frostman_check(const EquilibriumResult& result) {
    if (!std::isfinite(result.value)) return 0.0;
    double dev = 0.0;
    for (std::size_t i = 0; i < result.potential.size(); ++i) {
        if (result.frostman_scope == EquilibriumResult::Scope::Support && !(result.weights[i] > 0.0)) continue;
        dev = std::max(dev, std::abs(result.potential[i] - result.value));
    }
    return dev;
}

}  // namespace berkgreen
