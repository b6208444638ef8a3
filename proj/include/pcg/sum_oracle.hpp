#pragma once

#include "pcg/body.hpp"

#include <memory>
#include <optional>
#include <string>

namespace pcg {

/// Membership oracle for a Minkowski sum A + B, or A + [-v, v] for a segment.
///
/// The decision procedure is chosen once at construction from the pair of
/// representations: linear programming for two polytopes, edge enumeration for two
/// generated bodies, projected gradient for a convex parametrized body plus an
/// ellipsoid, boundary-patch search for a generated body plus anything, and a
/// boundary search otherwise. Inside answers always come with an explicit
/// decomposition x = a + b; outside answers are exact for the convex strategies.
class SumOracle {
public:
    SumOracle(const Body& a, const Body& b);
    SumOracle(const Body& a, const Vector& segment_half);

    int dim() const;
    Membership contains(const Vector& x) const;
    /// Exact per-axis sup |x_i| of the sum.
    const Vector& axis_extents() const;
    /// Closed-form volume for aligned boxes, parallel ellipsoids and ellipsoid + segment.
    std::optional<double> exact_volume() const;
    const std::string& strategy() const;

    struct Impl;

private:
    std::shared_ptr<const Impl> impl_;
};

}  // namespace pcg
