#pragma once

#include "pcg/body.hpp"
#include "pcg/sum_oracle.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace pcg {

inline constexpr long kDefaultBudget = 200'000;
inline constexpr long kMinBudget = 1'000;
/// Fraction of indeterminate memberships above which an estimate is flagged.
inline constexpr double kIndeterminateFlag = 1e-3;

enum class VolumeMethod { exact, monte_carlo };

struct VolumeEstimate {
    double value = 0.0;
    double std_error = 0.0;
    VolumeMethod method = VolumeMethod::exact;
    long samples = 0;
    long indeterminate = 0;
    bool flagged = false;

    static VolumeEstimate exact(double v) { return VolumeEstimate{v, 0.0, VolumeMethod::exact, 0, 0, false}; }
};

std::string to_string(VolumeMethod m);

/// Lebesgue measure of the Euclidean unit ball.
double unit_ball_volume(int n);

/// A_1 + A_2 as a membership oracle.
struct SumBody {
    Body left;
    Body right;
    SumBody(Body l, Body r);
};

VolumeEstimate volume(const Body& b, long budget = kDefaultBudget, std::uint64_t seed = 0);
/// Decides x in left + right; indeterminate when the search could not certify either answer.
Membership sum_membership(const SumBody& s, const Vector& x);
VolumeEstimate volume_sum(const Body& a, const Body& b, long budget = kDefaultBudget, std::uint64_t seed = 0);
/// |B + [-v, v]|.
VolumeEstimate volume_sum_segment(const Body& b, const Vector& half, long budget = kDefaultBudget,
                                  std::uint64_t seed = 0);
VolumeEstimate volume_intersection(const Body& a, const Body& b, long budget = kDefaultBudget,
                                   std::uint64_t seed = 0);

/// Ray-sampling containment check: gauge_outer <= gauge_inner on `rays` directions,
/// including the coordinate axes and the generator directions of the inner body.
bool certified_subset(const Body& inner, const Body& outer, int rays = 1000, std::uint64_t seed = 0);

/// s(B) = (|B| |B°|)^{1/n} with delta-method error.
VolumeEstimate volume_product(const Body& b, long budget = kDefaultBudget, std::uint64_t seed = 0);

/// Hit-or-miss estimate over the box prod [-h_i, h_i] using the half-box x_1 >= 0;
/// the oracle must describe a set symmetric under x -> -x.
VolumeEstimate monte_carlo_volume(const std::function<Membership(const Vector&)>& oracle, const Vector& half_extent,
                                  long budget, std::uint64_t seed);

}  // namespace pcg
