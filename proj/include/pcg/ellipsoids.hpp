#pragma once

#include "pcg/body.hpp"
#include "pcg/measure.hpp"

#include <cstdint>
#include <string>

namespace pcg {

/// Volume-preserving maps u_i taking the associated ellipsoid D_i of body i to a round
/// ball of radius rho_i; alpha_i is the volume radius of body i.
struct PositionedPair {
    LinearMap u1;
    LinearMap u2;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double alpha1_std_error = 0.0;
    double alpha2_std_error = 0.0;
    Body d1;
    Body d2;
    double rho1 = 0.0;
    double rho2 = 0.0;
    std::string description;
};

/// Minimum-volume ellipsoid containing the convex hull of b (Khachiyan coordinate
/// ascent with away steps). Generated bodies use their generators, linear images are
/// handled by equivariance, anything else by 2000 gauge-normalized boundary directions
/// refined at the contact points.
Body enclosing_ellipsoid(const Body& b);
/// polar(enclosing_ellipsoid(polar(b))).
Body inscribed_ellipsoid(const Body& b);

/// Minimum-volume centered ellipsoid {x : x^T A x <= 1} containing +-points; returns A.
Matrix mvee_shape(const std::vector<Vector>& points);
/// Warm-started variant: weights (possibly shorter than points) seed the iteration and
/// receive the final barycentric weights.
Matrix mvee_shape(const std::vector<Vector>& points, Vector& weights);

/// M(B, D) = (|B + D| / |B ∩ D| * |B° + D°| / |B° ∩ D°|)^{1/n} with delta-method error.
VolumeEstimate milman_functional(const Body& b, const Body& d, long budget = kDefaultBudget, std::uint64_t seed = 0);

PositionedPair position_pair(const Body& b1, const Body& b2, long budget = kDefaultBudget, std::uint64_t seed = 0);

/// T = u2^{-1} u1, renormalized to |det T| = 1.
LinearMap positioning_map(const PositionedPair& pair);

}  // namespace pcg
