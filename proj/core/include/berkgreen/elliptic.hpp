#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "berkgreen/green.hpp"
#include "berkgreen/measure.hpp"
#include "berkgreen/metric_space.hpp"

namespace berkgreen {

enum class Reduction { Good, Multiplicative };

std::string_view to_string(Reduction reduction);
Reduction parse_reduction(std::string_view text);

/// Skeleton and canonical measure of an elliptic curve over a local field.
///
/// Good reduction: one type-II vertex "zeta0", mu = delta at it.
/// Multiplicative reduction: a circle of circumference L = log|j| made of
/// edges "arc0" (a -> b) and "arc1" (b -> a) of length L/2, mu = Haar.
struct EllipticModel {
    Reduction reduction = Reduction::Good;
    double log_abs_j = 0.0;
    MetricSpace space;
    SignedMeasure mu;
    SpacePoint base;

    /// log+|j|, also the circle circumference.
    double circumference() const { return log_abs_j > 0.0 ? log_abs_j : 0.0; }
    /// Circle point at arc length s (taken mod L) from vertex "a". Multiplicative only.
    SpacePoint arc_point(double s) const;
};

EllipticModel build_elliptic(Reduction reduction, double log_abs_j, std::vector<TreeDescription> trees = {});

/// The Green function of mu on the model; h = 0 evaluates in closed form.
GreenFunction elliptic_green(const EllipticModel& model, double h = 0.0);

/// D(Z) = (sum_{i != j} g_mu(P_i, P_j) + (N/12) log+|j|) / N^2.
double local_discrepancy(const EllipticModel& model, std::span<const SpacePoint> points);
double local_discrepancy(const EllipticModel& model, const GreenFunction& g, std::span<const SpacePoint> points);

struct Generator {
    enum class Kind { Equispaced, RandomUniform, Clustered, Custom };

    Kind kind = Kind::Equispaced;
    /// Cluster width as a fraction of L.
    double width = 0.01;
    /// Custom sequence; Z_n is its first n entries.
    std::vector<SpacePoint> custom;

    static Generator parse(std::string_view name, double width = 0.01);
};

std::string_view to_string(Generator::Kind kind);

/// n distinct points. Random kinds draw from std::mt19937_64 seeded by (seed, n)
/// and redraw on collisions, giving up after 100 retries.
std::vector<SpacePoint> generate_points(const EllipticModel& model, const Generator& generator, std::size_t n,
                                        std::uint64_t seed);

struct DiscrepancyRecord {
    std::size_t n = 0;
    double discrepancy = 0.0;
    double bl = 0.0;
};

struct DiscrepancyTrace {
    std::vector<DiscrepancyRecord> records;
    std::uint64_t seed = 0;
    double h = 0.0;
    Generator::Kind generator = Generator::Kind::Equispaced;
    /// Resolution of the bounded-Lipschitz dictionary.
    double bl_resolution = 0.0;
};

DiscrepancyTrace equidistribution_experiment(const EllipticModel& model, const Generator& generator,
                                             std::span<const std::size_t> n_values, std::uint64_t seed, double h = 0.0);

/// Header "n,D,BL,seed,h", one row per record.
void write_csv(std::ostream& out, const DiscrepancyTrace& trace);

}  // namespace berkgreen
