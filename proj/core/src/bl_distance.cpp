#include "berkgreen/bl_distance.hpp"

#include <algorithm>
#include <cmath>

namespace berkgreen {

TestDictionary::TestDictionary(const MetricSpace& space) : graph_(&space.graph()) {
    const MetricGraph& g = *graph_;
    const double diam = g.diameter();
    const double step = std::max(g.total_length() / 512.0, 1e-9);
    std::vector<SpacePoint> fine = g.mesh(step, true);

    std::vector<double> nearest(fine.size(), std::numeric_limits<double>::infinity());
    std::size_t next = 0;
    for (std::size_t c = 0; c < kCenters && c < fine.size(); ++c) {
        centers_.push_back(fine[next]);
        for (std::size_t i = 0; i < fine.size(); ++i) nearest[i] = std::min(nearest[i], g.distance(fine[i], fine[next]));
        next = static_cast<std::size_t>(std::max_element(nearest.begin(), nearest.end()) - nearest.begin());
    }
    const double covering = fine.empty() ? 0.0 : *std::max_element(nearest.begin(), nearest.end()) + step / 2.0;

    constexpr double kScales[kRadii] = {0.125, 0.25, 0.5, 1.0};
    for (std::size_t c = 0; c < centers_.size(); ++c)
        for (double s : kScales) {
            center_of_.push_back(c);
            radius_.push_back(s * diam);
        }
    resolution_ = diam > 0.0 ? covering / (1.0 + kScales[0] * diam) : 0.0;
}

double TestDictionary::evaluate(std::size_t k, const SpacePoint& x) const {
    const double r = radius_[k];
    return std::max(0.0, r - graph_->distance(x, centers_[center_of_[k]])) / (1.0 + r);
}

double TestDictionary::piece_integral(std::size_t k, const DensityPiece& piece) const {
    const MetricGraph& g = *graph_;
    const auto& edge = g.edge(piece.edge);
    const SpacePoint& c = centers_[center_of_[k]];
    const double r = radius_[k];
    const double len = edge.length;
    const double du = g.distance_to_vertex(c, edge.u);
    const double dv = g.distance_to_vertex(c, edge.v);

    // rho(., c) on the edge is a minimum of affine pieces; collect every
    // place where two pieces cross or a piece meets the level r
    std::vector<double> cuts = {piece.from, piece.to, (dv + len - du) / 2.0, r - du, len + dv - r};
    if (!c.is_vertex() && c.edge() == piece.edge) {
        const double sc = c.offset();
        cuts.insert(cuts.end(), {sc, (sc - du) / 2.0, (len + dv + sc) / 2.0, sc - r, sc + r});
    }
    std::vector<double> grid;
    for (double t : cuts)
        if (t >= piece.from && t <= piece.to) grid.push_back(t);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    double total = 0.0;
    double prev = evaluate(k, g.point(piece.edge, grid.front()));
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double cur = evaluate(k, g.point(piece.edge, grid[i]));
        total += 0.5 * (prev + cur) * (grid[i] - grid[i - 1]);
        prev = cur;
    }
    return piece.density * total;
}

double TestDictionary::integrate(std::size_t k, const SignedMeasure& m) const {
    double total = 0.0;
    for (const Atom& a : m.atoms()) total += a.weight * evaluate(k, a.point);
    for (const DensityPiece& p : m.densities()) total += piece_integral(k, p);
    return total;
}

double TestDictionary::distance(const SignedMeasure& a, const SignedMeasure& b) const {
    const SignedMeasure diff = a - b;
    double best = 0.0;
    for (std::size_t k = 0; k < size(); ++k) best = std::max(best, std::abs(integrate(k, diff)));
    return best;
}

double bl_distance(const MetricSpace& space, const SignedMeasure& a, const SignedMeasure& b) {
    return TestDictionary(space).distance(a, b);
}

}  // namespace berkgreen
