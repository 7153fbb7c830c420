#include "berkgreen/green.hpp"

#include <cmath>
#include <limits>

namespace berkgreen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool has_type_one_atom(const MetricSpace& space, const SignedMeasure& m) {
    const SignedMeasure merged = m.merged();
    for (const Atom& a : merged.atoms())
        if (space.type(a.point) == PointType::I) return true;
    return false;
}

}  // namespace

bool has_continuous_potentials(const MetricSpace& space, const SignedMeasure& mu) {
    mu.validate(space.graph());
    return !has_type_one_atom(space, mu);
}

double potential_function(const KernelHandle& kernel, const SignedMeasure& nu, const SpacePoint& zeta,
                          const SpacePoint& x) {
    const MetricSpace& space = kernel.space();
    nu.validate(space.graph());
    const SignedMeasure m = nu.merged();
    if (space.type(zeta) == PointType::I) {
        for (const Atom& a : m.atoms())
            if (a.point == zeta)
                throw DomainError("potential_function: zeta " + space.graph().describe(zeta) +
                                  " is of type I and carries an atom of nu");
    }
    double total = 0.0;
    for (const Atom& a : m.atoms()) total += a.weight * kernel.three_variable(zeta, x, a.point);
    // densities: int g(x,y) - g(x,zeta) - g(y,zeta) over the pieces, in closed form
    if (m.has_densities()) {
        const SignedMeasure d = m.density_part();
        const double gxz = kernel(x, zeta);
        total += kernel.integrate(x, d) - d.total_mass() * gxz - kernel.integrate(zeta, d);
    }
    return total;
}

GreenFunction GreenFunction::build(const MetricSpace& space, const SignedMeasure& mu, const SpacePoint& zeta0, double h) {
    if (!(h >= 0.0)) throw InputError("quadrature scale h must be >= 0");
    mu.validate(space.graph());
    if (!mu.is_probability(1e-12)) throw DomainError("Arakelov-Green function needs a probability measure mu");
    if (!has_continuous_potentials(space, mu))
        throw DomainError("mu has an atom at a type-I point and so does not have continuous potentials");
    KernelHandle kernel(space, zeta0);
    SignedMeasure quad = h > 0.0 ? atomize(space.graph(), mu, h) : mu;
    quad = quad.merged();
    const double c = kernel.integrate(quad, quad);
    return GreenFunction(std::move(kernel), mu, std::move(quad), h, c);
}

double GreenFunction::evaluate(const SpacePoint& x, const SpacePoint& y, double ux, double uy) const {
    const double g = kernel_(x, y);
    if (std::isinf(g)) return g;
    return g - ux - uy + normalization_;
}

double GreenFunction::operator()(const SpacePoint& x, const SpacePoint& y) const {
    return evaluate(x, y, potential_of_mu(x), potential_of_mu(y));
}

double GreenFunction::integrate(const SpacePoint& x, const SignedMeasure& nu) const {
    const SignedMeasure m = nu.merged();
    const double mass = m.total_mass();
    const double gx = kernel_.integrate(x, m);
    if (std::isinf(gx)) return gx;
    const double ux = potential_of_mu(x);
    // int U d nu = int int g d mu d nu
    const double u_nu = kernel_.integrate(quadrature_mu_, m);
    return gx - mass * ux - u_nu + mass * normalization_;
}

double GreenFunction::integrate(const SignedMeasure& a, const SignedMeasure& b) const {
    const SignedMeasure ma = a.merged();
    const SignedMeasure mb = b.merged();
    const double gab = kernel_.integrate(ma, mb);
    if (std::isinf(gab)) return gab;
    const double ua = kernel_.integrate(quadrature_mu_, ma);
    const double ub = kernel_.integrate(quadrature_mu_, mb);
    const double mass_a = ma.total_mass();
    const double mass_b = mb.total_mass();
    return gab - mass_b * ua - mass_a * ub + mass_a * mass_b * normalization_;
}

EnergyReport energy(const GreenFunction& g, const SignedMeasure& nu, std::optional<double> h) {
    const MetricSpace& space = g.space();
    nu.validate(space.graph());
    EnergyReport report;
    report.h = h.value_or(g.quadrature_h());
    if (report.h < 0.0) throw InputError("energy: h must be >= 0");

    const SignedMeasure merged = nu.merged();
    if (has_type_one_atom(space, merged)) {
        report.value = kInf;
        report.diagonal = kInf;
        return report;
    }

    const std::vector<Atom>& atoms = merged.atoms();
    std::vector<double> u(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) u[i] = g.potential_of_mu(atoms[i].point);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const Atom& a = atoms[i];
        report.diagonal += a.weight * a.weight * g.evaluate(a.point, a.point, u[i], u[i]);
        for (std::size_t j = i + 1; j < atoms.size(); ++j)
            report.off_diagonal += 2.0 * a.weight * atoms[j].weight * g.evaluate(a.point, atoms[j].point, u[i], u[j]);
    }

    if (merged.has_densities()) {
        const SignedMeasure dens = merged.density_part();
        const SignedMeasure atomic = merged.atomic_part();
        if (report.h > 0.0) {
            // density atoms at scale h, including their own diagonal
            const SignedMeasure cells = atomize(space.graph(), dens, report.h);
            std::vector<double> uc(cells.atoms().size());
            for (std::size_t k = 0; k < uc.size(); ++k) uc[k] = g.potential_of_mu(cells.atoms()[k].point);
            double cross = 0.0;
            for (std::size_t i = 0; i < atoms.size(); ++i)
                for (std::size_t k = 0; k < uc.size(); ++k)
                    cross += atoms[i].weight * cells.atoms()[k].weight *
                             g.evaluate(atoms[i].point, cells.atoms()[k].point, u[i], uc[k]);
            double self = 0.0;
            for (std::size_t k = 0; k < uc.size(); ++k) {
                const Atom& ck = cells.atoms()[k];
                self += ck.weight * ck.weight * g.evaluate(ck.point, ck.point, uc[k], uc[k]);
                for (std::size_t l = k + 1; l < uc.size(); ++l)
                    self += 2.0 * ck.weight * cells.atoms()[l].weight *
                            g.evaluate(ck.point, cells.atoms()[l].point, uc[k], uc[l]);
            }
            report.density = 2.0 * cross + self;
        } else {
            report.density = 2.0 * g.integrate(atomic, dens) + g.integrate(dens, dens);
        }
    }
    report.value = report.diagonal + report.off_diagonal + report.density;
    return report;
}

}  // namespace berkgreen
