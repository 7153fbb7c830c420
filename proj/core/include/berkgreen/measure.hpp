#pragma once

#include <vector>

#include "berkgreen/metric_space.hpp"

namespace berkgreen {

struct Atom {
    SpacePoint point;
    double weight = 0.0;
    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Constant density on the sub-interval [from, to] of one edge.
struct DensityPiece {
    int edge = 0;
    double from = 0.0;
    double to = 0.0;
    double density = 0.0;

    double length() const { return to - from; }
    double mass() const { return density * (to - from); }
    friend bool operator==(const DensityPiece&, const DensityPiece&) = default;
};

/// Finite signed measure: weighted atoms plus piecewise-constant edge densities.
class SignedMeasure {
public:
    SignedMeasure() = default;
    SignedMeasure(std::vector<Atom> atoms, std::vector<DensityPiece> densities = {})
        : atoms_(std::move(atoms)), densities_(std::move(densities)) {}

    static SignedMeasure dirac(const SpacePoint& p, double weight = 1.0) { return SignedMeasure({{p, weight}}); }
    /// Uniform probability density over every edge of `graph`.
    static SignedMeasure uniform(const MetricGraph& graph);

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<DensityPiece>& densities() const { return densities_; }
    bool has_densities() const { return !densities_.empty(); }
    bool empty() const { return atoms_.empty() && densities_.empty(); }

    double total_mass() const;
    double atom_mass() const;
    double density_mass() const;
    /// Nonnegative atoms and densities, total mass 1 within `tol`.
    bool is_probability(double tol = 1e-12) const;

    /// Throws InputError if an atom or density piece does not fit `graph`.
    void validate(const MetricGraph& graph) const;

    /// Atoms at equal points combined; zero weights dropped; atoms sorted by point.
    SignedMeasure merged() const;

    SignedMeasure scaled(double factor) const;
    friend SignedMeasure operator+(const SignedMeasure& a, const SignedMeasure& b);
    friend SignedMeasure operator-(const SignedMeasure& a, const SignedMeasure& b) { return a + b.scaled(-1.0); }

    /// Only the atoms / only the densities.
    SignedMeasure atomic_part() const { return SignedMeasure(atoms_); }
    SignedMeasure density_part() const { return SignedMeasure({}, densities_); }

    friend bool operator==(const SignedMeasure&, const SignedMeasure&) = default;

private:
    std::vector<Atom> atoms_;
    std::vector<DensityPiece> densities_;
};

/// Laplacians are purely atomic measures.
using LaplacianMeasure = SignedMeasure;

/// Replaces each density piece by atoms at the midpoints of ceil(length / h)
/// equal cells, each carrying its cell's mass. Atoms pass through unchanged.
SignedMeasure atomize(const MetricGraph& graph, const SignedMeasure& m, double h);

}  // namespace berkgreen
