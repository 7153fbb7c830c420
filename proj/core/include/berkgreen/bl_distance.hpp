#pragma once

#include <vector>

#include "berkgreen/measure.hpp"
#include "berkgreen/metric_space.hpp"

namespace berkgreen {

/// Fixed family of Lipschitz tent functions used to approximate the dual
/// bounded-Lipschitz distance between two measures on a metric space.
///
/// Centers are chosen by farthest-point sampling over a fine mesh (lowest
/// index on ties), radii are diam * {1/8, 1/4, 1/2, 1}, and every function is
///
///   f(x) = max(0, r - rho(x, center)) / (1 + r),
///
/// so that |f| + Lip(f) <= 1. Integrals against densities are exact.
class TestDictionary {
public:
    static constexpr std::size_t kCenters = 16;
    static constexpr std::size_t kRadii = 4;

    explicit TestDictionary(const MetricSpace& space);

    std::size_t size() const { return radius_.size(); }
    const std::vector<SpacePoint>& centers() const { return centers_; }

    double evaluate(std::size_t k, const SpacePoint& x) const;
    double integrate(std::size_t k, const SignedMeasure& m) const;
    /// max_k |int f_k d a - int f_k d b|.
    double distance(const SignedMeasure& a, const SignedMeasure& b) const;
    /// Covering radius of the centers times the largest function scale: a
    /// floor below which distance() cannot resolve differences.
    double resolution() const { return resolution_; }

private:
    double piece_integral(std::size_t k, const DensityPiece& piece) const;

    const MetricGraph* graph_;
    std::vector<SpacePoint> centers_;
    std::vector<std::size_t> center_of_;
    std::vector<double> radius_;
    double resolution_ = 0.0;
};

double bl_distance(const MetricSpace& space, const SignedMeasure& a, const SignedMeasure& b);

}  // namespace berkgreen
