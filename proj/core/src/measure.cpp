#include "berkgreen/measure.hpp"

#include <algorithm>
#include <cmath>

namespace berkgreen {

SignedMeasure SignedMeasure::uniform(const MetricGraph& graph) {
    const double total = graph.total_length();
    if (!(total > 0.0)) throw InputError("uniform measure needs a graph with edges");
    std::vector<DensityPiece> pieces;
    for (std::size_t e = 0; e < graph.edge_count(); ++e)
        pieces.push_back({static_cast<int>(e), 0.0, graph.edge(static_cast<int>(e)).length, 1.0 / total});
    return SignedMeasure({}, std::move(pieces));
}

double SignedMeasure::atom_mass() const {
    double m = 0.0;
    for (const Atom& a : atoms_) m += a.weight;
    return m;
}

double SignedMeasure::density_mass() const {
    double m = 0.0;
    for (const DensityPiece& p : densities_) m += p.mass();
    return m;
}

double SignedMeasure::total_mass() const { return atom_mass() + density_mass(); }

bool SignedMeasure::is_probability(double tol) const {
    for (const Atom& a : atoms_)
        if (a.weight < 0.0) return false;
    for (const DensityPiece& p : densities_)
        if (p.density < 0.0) return false;
    return std::abs(total_mass() - 1.0) <= tol;
}

void SignedMeasure::validate(const MetricGraph& graph) const {
    for (const Atom& a : atoms_) {
        graph.validate(a.point);
        if (!std::isfinite(a.weight)) throw InputError("atom weight must be finite");
    }
    for (const DensityPiece& p : densities_) {
        if (p.edge < 0 || static_cast<std::size_t>(p.edge) >= graph.edge_count())
            throw InputError("density piece references edge index " + std::to_string(p.edge) + " out of range");
        const double len = graph.edge(p.edge).length;
        if (!(p.from >= 0.0 && p.from < p.to && p.to <= len))
            throw InputError("density piece on edge '" + graph.edge(p.edge).id + "' needs 0 <= from < to <= length");
        if (!std::isfinite(p.density)) throw InputError("density must be finite");
    }
}

SignedMeasure SignedMeasure::merged() const {
    std::vector<Atom> sorted = atoms_;
    std::stable_sort(sorted.begin(), sorted.end(), [](const Atom& a, const Atom& b) { return a.point < b.point; });
    std::vector<Atom> out;
    for (const Atom& a : sorted) {
        if (!out.empty() && out.back().point == a.point) out.back().weight += a.weight;
        else out.push_back(a);
    }
    std::erase_if(out, [](const Atom& a) { return a.weight == 0.0; });
    std::vector<DensityPiece> pieces = densities_;
    std::erase_if(pieces, [](const DensityPiece& p) { return p.density == 0.0; });
    return SignedMeasure(std::move(out), std::move(pieces));
}

SignedMeasure SignedMeasure::scaled(double factor) const {
    SignedMeasure m = *this;
    for (Atom& a : m.atoms_) a.weight *= factor;
    for (DensityPiece& p : m.densities_) p.density *= factor;
    return m;
}

SignedMeasure operator+(const SignedMeasure& a, const SignedMeasure& b) {
    SignedMeasure m = a;
    m.atoms_.insert(m.atoms_.end(), b.atoms_.begin(), b.atoms_.end());
    m.densities_.insert(m.densities_.end(), b.densities_.begin(), b.densities_.end());
    return m;
}

SignedMeasure atomize(const MetricGraph& graph, const SignedMeasure& m, double h) {
    if (!(h > 0.0)) throw InputError("atomize: h must be positive");
    m.validate(graph);
    std::vector<Atom> atoms = m.atoms();
    for (const DensityPiece& p : m.densities()) {
        const auto cells = std::max<long>(1, static_cast<long>(std::ceil(p.length() / h - 1e-12)));
        const double width = p.length() / static_cast<double>(cells);
        const double mass = p.density * width;
        for (long k = 0; k < cells; ++k) {
            const double mid = p.from + (static_cast<double>(k) + 0.5) * width;
            atoms.push_back({graph.point(p.edge, mid), mass});
        }
    }
    return SignedMeasure(std::move(atoms));
}

}  // namespace berkgreen
