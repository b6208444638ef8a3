#pragma once

#include "pcg/body.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace pcg {

/// One term lambda * generators[generator] of a p-convex decomposition.
struct GaugeTerm {
    double coefficient;
    std::size_t generator;
};

struct GaugeResult {
    double value = 0.0;
    /// Exact convex-hull gauge for generated bodies; equals value for exact variants.
    double lower_bound = 0.0;
    std::optional<std::vector<GaugeTerm>> certificate;
    bool is_upper_bound = false;
};

GaugeResult gauge(const Body& b, const Vector& x);
/// Upper value of gauge() without building a certificate.
double gauge_value(const Body& b, const Vector& x);
/// Three-valued membership: indeterminate when lower_bound <= 1 < value.
Membership membership(const Body& b, const Vector& x);
/// True iff the certified upper bound of the gauge is <= 1.
bool contains(const Body& b, const Vector& x);
/// True when gauge() is exact for this body.
bool has_exact_gauge(const Body& b);

/// h_B(theta) = sup_{x in B} <x, theta>.
double support(const Body& b, const Vector& theta);
/// Per-axis sup |x_i| over the body.
Vector axis_extents(const Body& b);

Body convex_hull(const Body& b);
Body polar(const Body& b);
/// Linear image with structural simplification (ellipsoids stay ellipsoids, diagonal
/// maps of boxes stay boxes, nested transforms are composed).
Body transformed(const LinearMap& map, const Body& b);
Body scaled(const Body& b, double t);
/// Shape matrix A with b = {x : x^T A x <= 1} when b is ellipsoidal.
std::optional<Matrix> ellipsoid_shape(const Body& b);

/// Grid approximation of membership in the balanced kernel: t x in the set for t_grid
/// equally spaced t in [-1, 1].
bool balanced_kernel_contains(const std::function<bool(const Vector&)>& oracle, const Vector& x, int t_grid);
/// p = 1 / log2(2C).
double aoki_rolewicz_exponent(double quasi_norm_constant);
/// max over sampled pairs of |x+y|_b / (|x|_b + |y|_b); a lower bound on the constant C.
double quasi_norm_constant_estimate(const Body& b, long samples, std::uint64_t seed);

}  // namespace pcg
