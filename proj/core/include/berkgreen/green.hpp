#pragma once

#include <optional>

#include "berkgreen/kernel.hpp"
#include "berkgreen/measure.hpp"
#include "berkgreen/metric_space.hpp"

namespace berkgreen {

/// Sufficient condition used throughout: mu carries no atom at a type-I point.
bool has_continuous_potentials(const MetricSpace& space, const SignedMeasure& mu);

/// u_{zeta0,nu}(x, zeta) = integral of g_{zeta0}(zeta, x, y) d nu(y).
/// Requires zeta not of type I, or zeta outside the support of nu.
double potential_function(const KernelHandle& kernel, const SignedMeasure& nu, const SpacePoint& zeta,
                          const SpacePoint& x);

/// Normalized Arakelov-Green function of a probability measure mu with continuous potentials:
///
///   g_mu(x, y) = g_{zeta0}(x, y) - U(x) - U(y) + C,   U(x) = int g_{zeta0}(x, z) d mu(z),
///
/// with C = int int g_{zeta0} d mu d mu, so that int int g_mu d mu d mu = 0.
///
/// With quadrature scale h = 0 every integral is evaluated in closed form.
/// With h > 0 the density part of mu is first atomized at scale h; later
/// energy calls at the same h then share the quadrature error with C.
class GreenFunction {
public:
    static GreenFunction build(const MetricSpace& space, const SignedMeasure& mu, const SpacePoint& zeta0, double h = 0.0);

    const MetricSpace& space() const { return kernel_.space(); }
    const KernelHandle& kernel() const { return kernel_; }
    const SignedMeasure& mu() const { return mu_; }
    /// mu as used for the integrals (atomized when h > 0).
    const SignedMeasure& quadrature_mu() const { return quadrature_mu_; }
    double quadrature_h() const { return h_; }
    double normalization() const { return normalization_; }

    /// U(x) = int g_{zeta0}(x, z) d mu(z).
    double potential_of_mu(const SpacePoint& x) const { return kernel_.integrate(x, quadrature_mu_); }

    /// g_mu(x, y); +inf exactly when x = y is of type I.
    double operator()(const SpacePoint& x, const SpacePoint& y) const;
    /// Same as operator(), reusing precomputed U(x), U(y).
    double evaluate(const SpacePoint& x, const SpacePoint& y, double ux, double uy) const;

    /// int g_mu(x, y) d nu(y).
    double integrate(const SpacePoint& x, const SignedMeasure& nu) const;
    /// int int g_mu d a d b.
    double integrate(const SignedMeasure& a, const SignedMeasure& b) const;

private:
    GreenFunction(KernelHandle kernel, SignedMeasure mu, SignedMeasure quadrature_mu, double h, double c)
        : kernel_(std::move(kernel)), mu_(std::move(mu)), quadrature_mu_(std::move(quadrature_mu)), h_(h), normalization_(c) {}

    KernelHandle kernel_;
    SignedMeasure mu_;
    SignedMeasure quadrature_mu_;
    double h_ = 0.0;
    double normalization_ = 0.0;
};

inline double green_eval(const GreenFunction& g, const SpacePoint& x, const SpacePoint& y) { return g(x, y); }

/// u_nu(x, mu) = int g_mu(x, y) d nu(y).
inline double generalized_potential(const GreenFunction& g, const SignedMeasure& nu, const SpacePoint& x) {
    return g.integrate(x, nu);
}

struct EnergyReport {
    double value = 0.0;
    /// sum_i w_i^2 g_mu(x_i, x_i) over the atoms of nu.
    double diagonal = 0.0;
    /// sum_{i != j} w_i w_j g_mu(x_i, x_j) over the atoms of nu.
    double off_diagonal = 0.0;
    /// Every term involving the density part of nu.
    double density = 0.0;
    /// Quadrature scale; 0 means closed form.
    double h = 0.0;
};

/// mu-energy I_mu(nu) = int int g_mu d nu d nu. +inf when nu has an atom at a
/// type-I point. `h` defaults to the Green function's quadrature scale.
EnergyReport energy(const GreenFunction& g, const SignedMeasure& nu, std::optional<double> h = std::nullopt);

}  // namespace berkgreen
