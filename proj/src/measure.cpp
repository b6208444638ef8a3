#include "pcg/measure.hpp"

#include "pcg/bodies.hpp"
#include "pcg/random.hpp"

#include <fmt/format.h>

#include <array>
#include <cmath>

namespace pcg {

namespace {

constexpr int kChunks = 16;
constexpr double kBoxInflation = 1.01;

void check_budget(long budget) {
    if (budget < kMinBudget) {
        throw InvalidBodyError(fmt::format("Monte Carlo budget {} below the minimum of {}", budget, kMinBudget));
    }
}

std::optional<double> exact_volume(const Body& b) {
    struct Visitor {
        std::optional<double> operator()(const shape::StandardBall& s) const {
            const double lg = s.n * std::lgamma(1.0 + 1.0 / s.p) - std::lgamma(1.0 + s.n / s.p);
            return std::pow(2.0 * s.radius, s.n) * std::exp(lg);
        }
        std::optional<double> operator()(const shape::EuclideanBall& s) const {
            return unit_ball_volume(s.n) * std::pow(s.radius, s.n);
        }
        std::optional<double> operator()(const shape::Ellipsoid& s) const {
            return unit_ball_volume(static_cast<int>(s.shape.rows())) / std::sqrt(s.shape.determinant());
        }
        std::optional<double> operator()(const shape::Box& s) const { return (2.0 * s.half_widths).prod(); }
        std::optional<double> operator()(const shape::Transformed& s) const {
            if (auto v = exact_volume(*s.inner)) return std::abs(s.map.det()) * *v;
            return std::nullopt;
        }
        std::optional<double> operator()(const shape::PConvHull&) const { return std::nullopt; }
        std::optional<double> operator()(const shape::Polytope&) const { return std::nullopt; }
        std::optional<double> operator()(const shape::CapBody&) const { return std::nullopt; }
        std::optional<double> operator()(const shape::CapPolar&) const { return std::nullopt; }
    };
    return std::visit(Visitor{}, b.shape());
}

}  // namespace

std::string to_string(VolumeMethod m) { return m == VolumeMethod::exact ? "exact" : "monte_carlo"; }

double unit_ball_volume(int n) { return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0); }

SumBody::SumBody(Body l, Body r) : left(std::move(l)), right(std::move(r)) {
    if (left.dim() != right.dim()) throw DimensionError("SumBody: dimension mismatch");
}

VolumeEstimate monte_carlo_volume(const std::function<Membership(const Vector&)>& oracle, const Vector& h,
                                  long budget, std::uint64_t seed) {
    check_budget(budget);
    const int n = static_cast<int>(h.size());
    std::array<long, kChunks> hits{};
    std::array<long, kChunks> unknown{};
    parallel_for(kChunks, [&](std::size_t c) {
        const long count = budget / kChunks + (static_cast<long>(c) < budget % kChunks ? 1 : 0);
        Rng rng = make_rng(seed, 0x1000 + c);
        Vector x(n);
        long in = 0;
        long ind = 0;
        for (long i = 0; i < count; ++i) {
            // Half box x_1 >= 0; the set is symmetric so the hit fraction is unchanged.
            x(0) = h(0) * uniform01(rng);
            for (int j = 1; j < n; ++j) x(j) = h(j) * (2.0 * uniform01(rng) - 1.0);
            const Membership m = oracle(x);
            if (m == Membership::inside) {
                ++in;
            } else if (m == Membership::indeterminate) {
                ++ind;
            }
        }
        hits[c] = in;
        unknown[c] = ind;
    });
    long in = 0;
    long ind = 0;
    for (int c = 0; c < kChunks; ++c) {
        in += hits[c];
        ind += unknown[c];
    }
    const double box = (2.0 * h).prod();
    const double f = static_cast<double>(in) / static_cast<double>(budget);
    VolumeEstimate e;
    e.method = VolumeMethod::monte_carlo;
    e.samples = budget;
    e.value = box * f;
    e.std_error = box * std::sqrt(f * (1.0 - f) / static_cast<double>(budget));
    e.indeterminate = ind;
    e.flagged = static_cast<double>(ind) > kIndeterminateFlag * static_cast<double>(budget);
    return e;
}

VolumeEstimate volume(const Body& b, long budget, std::uint64_t seed) {
    if (auto v = exact_volume(b)) return VolumeEstimate::exact(*v);
    if (const auto* t = b.as<shape::Transformed>()) {
        VolumeEstimate e = volume(*t->inner, budget, seed);
        const double d = std::abs(t->map.det());
        e.value *= d;
        e.std_error *= d;
        return e;
    }
    check_budget(budget);
    return monte_carlo_volume([&](const Vector& x) { return membership(b, x); }, kBoxInflation * axis_extents(b),
                              budget, seed);
}

Membership sum_membership(const SumBody& s, const Vector& x) { return SumOracle(s.left, s.right).contains(x); }

VolumeEstimate volume_sum(const Body& a, const Body& b, long budget, std::uint64_t seed) {
    const SumOracle oracle(a, b);
    if (auto v = oracle.exact_volume()) return VolumeEstimate::exact(*v);
    return monte_carlo_volume([&](const Vector& x) { return oracle.contains(x); },
                              kBoxInflation * oracle.axis_extents(), budget, seed);
}

VolumeEstimate volume_sum_segment(const Body& b, const Vector& half, long budget, std::uint64_t seed) {
    if (half.isZero(0.0)) return volume(b, budget, seed);
    const SumOracle oracle(b, half);
    if (auto v = oracle.exact_volume()) return VolumeEstimate::exact(*v);
    return monte_carlo_volume([&](const Vector& x) { return oracle.contains(x); },
                              kBoxInflation * oracle.axis_extents(), budget, seed);
}

bool certified_subset(const Body& inner, const Body& outer, int rays, std::uint64_t seed) {
    if (inner.dim() != outer.dim()) throw DimensionError("certified_subset: dimension mismatch");
    const int n = inner.dim();
    std::vector<Vector> dirs = sphere_points(n, rays);
    for (int i = 0; i < n; ++i) dirs.push_back(Vector::Unit(n, i));
    if (const auto* g = inner.generator_form()) {
        for (const auto& r : g->reps) dirs.push_back(r);
    }
    Rng rng = make_rng(seed, 0x5e7);
    for (int i = 0; i < n; ++i) dirs.push_back(uniform_sphere(rng, n));
    for (const auto& d : dirs) {
        const GaugeResult gi = gauge(inner, d);
        const double reach = gi.is_upper_bound ? gi.lower_bound : gi.value;
        if (gauge_value(outer, d) > reach * (1.0 + 1e-12)) return false;
    }
    return true;
}

VolumeEstimate volume_intersection(const Body& a, const Body& b, long budget, std::uint64_t seed) {
    if (a.dim() != b.dim()) throw DimensionError("volume_intersection: dimension mismatch");
    if (certified_subset(a, b, 1000, seed)) return volume(a, budget, seed);
    if (certified_subset(b, a, 1000, seed)) return volume(b, budget, seed);
    const Vector h = kBoxInflation * axis_extents(a).cwiseMin(axis_extents(b));
    return monte_carlo_volume(
        [&](const Vector& x) {
            const Membership ma = membership(a, x);
            if (ma == Membership::outside) return Membership::outside;
            const Membership mb = membership(b, x);
            if (mb == Membership::outside) return Membership::outside;
            if (ma == Membership::inside && mb == Membership::inside) return Membership::inside;
            return Membership::indeterminate;
        },
        h, budget, seed);
}

VolumeEstimate volume_product(const Body& b, long budget, std::uint64_t seed) {
    const int n = b.dim();
    const VolumeEstimate v1 = volume(b, budget, derive_seed(seed, 1));
    const VolumeEstimate v2 = volume(polar(b), budget, derive_seed(seed, 2));
    VolumeEstimate e;
    e.value = std::pow(v1.value * v2.value, 1.0 / n);
    const double rel = std::hypot(v1.std_error / v1.value, v2.std_error / v2.value);
    e.std_error = e.value * rel / n;
    e.method = (v1.method == VolumeMethod::exact && v2.method == VolumeMethod::exact) ? VolumeMethod::exact
                                                                                        : VolumeMethod::monte_carlo;
    e.samples = v1.samples + v2.samples;
    e.indeterminate = v1.indeterminate + v2.indeterminate;
    e.flagged = v1.flagged || v2.flagged;
    return e;
}

}  // namespace pcg
