#include "berkgreen/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace berkgreen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Grounded weighted Laplacian inverse: result(a, b) = g(a, b), zero on the base row/column.
Eigen::MatrixXd grounded_inverse(int nodes, const std::vector<std::tuple<int, int, double>>& edges, int base) {
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(nodes, nodes);
    for (const auto& [u, v, len] : edges) {
        const double w = 1.0 / len;
        lap(u, u) += w;
        lap(v, v) += w;
        lap(u, v) -= w;
        lap(v, u) -= w;
    }
    Eigen::MatrixXd green = Eigen::MatrixXd::Zero(nodes, nodes);
    if (nodes == 1) return green;
    // drop the base row and column
    std::vector<int> keep;
    for (int i = 0; i < nodes; ++i)
        if (i != base) keep.push_back(i);
    const auto m = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd reduced(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) reduced(i, j) = lap(keep[static_cast<std::size_t>(i)], keep[static_cast<std::size_t>(j)]);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(reduced);
    if (ldlt.info() != Eigen::Success) throw StructuralError("grounded Laplacian is singular; is the graph connected?");
    Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(m, m));
    inv = 0.5 * (inv + inv.transpose()).eval();
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) green(keep[static_cast<std::size_t>(i)], keep[static_cast<std::size_t>(j)]) = inv(i, j);
    return green;
}

double simpson(double a, double b, double fa, double fm, double fb) { return (b - a) / 6.0 * (fa + 4.0 * fm + fb); }

}  // namespace

// ---------------------------------------------------------------------------
// GraphKernel

GraphKernel::GraphKernel(std::shared_ptr<const MetricGraph> graph, const SpacePoint& zeta)
    : graph_(std::move(graph)), zeta_(zeta) {
    const MetricGraph& g = *graph_;
    g.validate(zeta_);
    int nodes = static_cast<int>(g.vertex_count());
    for (const auto& e : g.edges()) edges_.push_back({e.u, e.v, e.length});
    if (zeta_.is_vertex()) {
        base_node_ = zeta_.vertex();
    } else {
        // subdivide the base edge: piece A keeps the index, piece B is appended
        split_edge_ = zeta_.edge();
        split_offset_ = zeta_.offset();
        base_node_ = nodes++;
        const LocalEdge original = edges_[static_cast<std::size_t>(split_edge_)];
        edges_[static_cast<std::size_t>(split_edge_)] = {original.u, base_node_, split_offset_};
        edges_.push_back({base_node_, original.v, original.length - split_offset_});
    }
    std::vector<std::tuple<int, int, double>> list;
    for (const auto& e : edges_) list.emplace_back(e.u, e.v, e.length);
    green_ = grounded_inverse(nodes, list, base_node_);
}

GraphKernel::Local GraphKernel::local_point(int edge, double offset) const {
    const LocalEdge& e = edges_[static_cast<std::size_t>(edge)];
    if (offset <= 0.0) return {e.u, -1, 0.0};
    if (offset >= e.length) return {e.v, -1, 0.0};
    return {-1, edge, offset};
}

GraphKernel::Local GraphKernel::localize(const SpacePoint& p) const {
    graph_->validate(p);
    if (p.is_vertex()) return {p.vertex(), -1, 0.0};
    if (p.edge() != split_edge_) return {-1, p.edge(), p.offset()};
    if (p.offset() == split_offset_) return {base_node_, -1, 0.0};
    if (p.offset() < split_offset_) return {-1, split_edge_, p.offset()};
    return local_point(static_cast<int>(edges_.size()) - 1, p.offset() - split_offset_);
}

std::vector<GraphKernel::LocalPiece> GraphKernel::localize(const DensityPiece& piece) const {
    if (piece.edge != split_edge_) return {{piece.edge, piece.from, piece.to}};
    std::vector<LocalPiece> out;
    if (piece.from < split_offset_) out.push_back({split_edge_, piece.from, std::min(piece.to, split_offset_)});
    if (piece.to > split_offset_)
        out.push_back({static_cast<int>(edges_.size()) - 1, std::max(piece.from, split_offset_) - split_offset_,
                       piece.to - split_offset_});
    return out;
}

double GraphKernel::vertex_value(int a, const Local& y) const {
    if (y.vertex >= 0) return green_(a, y.vertex);
    const LocalEdge& e = edges_[static_cast<std::size_t>(y.edge)];
    return ((e.length - y.offset) * green_(a, e.u) + y.offset * green_(a, e.v)) / e.length;
}

double GraphKernel::eval(const Local& x, const Local& y) const {
    if (x.vertex >= 0) return vertex_value(x.vertex, y);
    if (y.vertex >= 0) return vertex_value(y.vertex, x);
    const LocalEdge& e = edges_[static_cast<std::size_t>(x.edge)];
    const double len = e.length;
    if (x.edge != y.edge) {
        return ((len - x.offset) * vertex_value(e.u, y) + x.offset * vertex_value(e.v, y)) / len;
    }
    // same edge: g(., y) is affine on [u, y] and [y, v] with outgoing slope sum -1 at y
    const double s = y.offset;
    const double at_u = vertex_value(e.u, y);
    const double at_v = vertex_value(e.v, y);
    const double at_y = ((len - s) * at_u + s * at_v) / len + s * (len - s) / len;
    if (x.offset <= s) return at_u + (at_y - at_u) * (x.offset / s);
    return at_y + (at_v - at_y) * ((x.offset - s) / (len - s));
}

double GraphKernel::operator()(const SpacePoint& x, const SpacePoint& y) const { return eval(localize(x), localize(y)); }

double GraphKernel::piece_integral(const Local& x, const LocalPiece& p) const {
    // g(x, .) is affine along p except for a kink at x
    double cuts[3] = {p.from, p.to, p.to};
    int n = 2;
    if (x.vertex < 0 && x.edge == p.edge && x.offset > p.from && x.offset < p.to) {
        cuts[1] = x.offset;
        n = 3;
    }
    double total = 0.0;
    double prev = eval(x, local_point(p.edge, cuts[0]));
    for (int k = 1; k < n; ++k) {
        const double cur = eval(x, local_point(p.edge, cuts[k]));
        total += 0.5 * (prev + cur) * (cuts[k] - cuts[k - 1]);
        prev = cur;
    }
    return total;
}

double GraphKernel::piece_integral(const LocalPiece& p, const LocalPiece& q) const {
    // s -> integral over p of g(., (q.edge, s)) is a cubic between the endpoints of p
    std::vector<double> cuts{q.from, q.to};
    if (p.edge == q.edge) {
        for (double c : {p.from, p.to})
            if (c > q.from && c < q.to) cuts.push_back(c);
        std::sort(cuts.begin(), cuts.end());
    }
    auto inner = [&](double s) { return piece_integral(local_point(q.edge, s), p); };
    double total = 0.0;
    for (std::size_t k = 1; k < cuts.size(); ++k) {
        const double a = cuts[k - 1];
        const double b = cuts[k];
        total += simpson(a, b, inner(a), inner(0.5 * (a + b)), inner(b));
    }
    return total;
}

double GraphKernel::integral(const SpacePoint& x, const DensityPiece& piece) const {
    const Local lx = localize(x);
    double total = 0.0;
    for (const LocalPiece& p : localize(piece)) total += piece_integral(lx, p);
    return total;
}

double GraphKernel::integral(const DensityPiece& p, const DensityPiece& q) const {
    double total = 0.0;
    for (const LocalPiece& lp : localize(p))
        for (const LocalPiece& lq : localize(q)) total += piece_integral(lp, lq);
    return total;
}

// ---------------------------------------------------------------------------
// Direct solve

KernelSolve solve_graph_kernel(std::shared_ptr<const MetricGraph> graph, const SpacePoint& zeta, const SpacePoint& y) {
    graph->validate(zeta);
    graph->validate(y);
    const SpacePoint cuts[2] = {zeta, y};
    auto refinement = std::make_shared<const GraphRefinement>(graph, cuts);
    const MetricGraph& g = refinement->graph();
    const SpacePoint base = refinement->map(zeta);
    const SpacePoint pole = refinement->map(y);
    const auto n = static_cast<int>(g.vertex_count());

    std::vector<double> values(static_cast<std::size_t>(n), 0.0);
    if (base != pole) {
        std::vector<std::tuple<int, int, double>> list;
        for (const auto& e : g.edges()) list.emplace_back(e.u, e.v, e.length);
        // residual = sum of outgoing slopes = delta_zeta - delta_y, i.e. (weighted Laplacian) g = delta_y - delta_zeta
        Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
        for (const auto& [u, v, len] : list) {
            const double w = 1.0 / len;
            lap(u, u) += w;
            lap(v, v) += w;
            lap(u, v) -= w;
            lap(v, u) -= w;
        }
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
        rhs(pole.vertex()) = 1.0;
        // pin g(zeta) = 0 by replacing the base row with the identity row
        lap.row(base.vertex()).setZero();
        lap.col(base.vertex()).setZero();
        lap(base.vertex(), base.vertex()) = 1.0;
        rhs(base.vertex()) = 0.0;
        Eigen::VectorXd sol = lap.ldlt().solve(rhs);
        for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = sol(i);
        values[static_cast<std::size_t>(base.vertex())] = 0.0;
    }
    PiecewiseAffineFn f = PiecewiseAffineFn::from_vertex_values(refinement->graph_ptr(), values);
    return KernelSolve{zeta, y, refinement, std::move(f)};
}

// ---------------------------------------------------------------------------
// KernelHandle

KernelHandle::KernelHandle(MetricSpace space, const SpacePoint& zeta0)
    : space_(std::move(space)), zeta0_(zeta0), base_component_(space_.component(zeta0)) {
    if (space_.type(zeta0_) == PointType::I)
        throw InputError("kernel base point " + space_.graph().describe(zeta0_) + " must not be of type I");
    graph_ = std::make_shared<const GraphKernel>(space_.graph_ptr(), zeta0_);
}

SpacePoint KernelHandle::base_retract(const SpacePoint& x) const {
    const int c = space_.component(x);
    if (c == MetricSpace::kSkeleton) return x;
    const SpacePoint attach = SpacePoint::at_vertex(space_.tree_attach(c));
    if (c != base_component_) return attach;
    return space_.meet(attach, x, zeta0_);
}

double KernelHandle::operator()(const SpacePoint& x, const SpacePoint& y) const {
    if (x == y && space_.type(x) == PointType::I) return kInf;
    const SpacePoint rx = base_retract(x);
    const SpacePoint ry = base_retract(y);
    if (rx != ry) return (*graph_)(rx, ry);
    const SpacePoint w = space_.meet(rx, x, y);
    return (*graph_)(ry, rx) + space_.rho(w, ry);
}

double KernelHandle::three_variable(const SpacePoint& zeta, const SpacePoint& x, const SpacePoint& y) const {
    if (x == y && y == zeta && space_.type(x) == PointType::I) return kInf;
    const double gxy = (*this)(x, y);
    const double gxz = (*this)(x, zeta);
    const double gyz = (*this)(y, zeta);
    const int infinite = static_cast<int>(std::isinf(gxy)) + static_cast<int>(std::isinf(gxz)) + static_cast<int>(std::isinf(gyz));
    if (infinite > 1) {
        throw DomainError("three-variable kernel is indeterminate (inf - inf) at zeta=" + space_.graph().describe(zeta) +
                          ", x=" + space_.graph().describe(x) + ", y=" + space_.graph().describe(y));
    }
    return gxy - gxz - gyz;
}

double KernelHandle::integrate(const SpacePoint& x, const SignedMeasure& m) const {
    double total = 0.0;
    for (const Atom& a : m.atoms()) {
        if (a.weight == 0.0) continue;
        total += a.weight * (*this)(x, a.point);
    }
    for (const DensityPiece& p : m.densities()) total += p.density * graph_->integral(x, p);
    return total;
}

double KernelHandle::integrate(const SignedMeasure& a, const SignedMeasure& b) const {
    double total = 0.0;
    for (const Atom& atom : a.atoms()) {
        if (atom.weight == 0.0) continue;
        total += atom.weight * integrate(atom.point, b);
    }
    for (const DensityPiece& p : a.densities()) {
        for (const Atom& atom : b.atoms()) total += p.density * atom.weight * graph_->integral(atom.point, p);
        for (const DensityPiece& q : b.densities()) total += p.density * q.density * graph_->integral(p, q);
    }
    return total;
}

double base_change_residual(const KernelHandle& at_zeta, const KernelHandle& at_zeta_prime, const SpacePoint& x,
                            const SpacePoint& y) {
    const SpacePoint& zeta = at_zeta.base();
    const double lhs = at_zeta(x, y);
    const double rhs = at_zeta_prime(x, y) - at_zeta_prime(x, zeta) - at_zeta_prime(y, zeta) + at_zeta_prime(zeta, zeta);
    return std::abs(lhs - rhs);
}

double base_change_residual(const MetricSpace& space, const SpacePoint& zeta, const SpacePoint& zeta_prime,
                            const SpacePoint& x, const SpacePoint& y) {
    return base_change_residual(KernelHandle(space, zeta), KernelHandle(space, zeta_prime), x, y);
}

}  // namespace berkgreen
