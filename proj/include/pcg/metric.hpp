#pragma once

#include "pcg/body.hpp"
#include "pcg/measure.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pcg {

/// Witness for N(covered, target_scale * covering) <= centers.size().
struct CoverCertificate {
    std::vector<Vector> centers;
    double target_scale = 1.0;
    Body covered_body;
    Body covering_body;
    /// |covered| / |target_scale * covering|; conservative (3 sigma) when volumes are estimated.
    double lower_bound = 0.0;

    std::size_t size() const { return centers.size(); }
};

/// True when x lies in some translate center + target_scale * covering_body.
bool covers(const CoverCertificate& cert, const Vector& x);
/// Number of uniform samples of the covered body that no translate contains.
long uncovered_samples(const CoverCertificate& cert, long samples, std::uint64_t seed);

/// Lattice net for N(a, scale * b).
///
/// Cells are parallelepipeds inscribed in scale * b in the frame of b; lattice points
/// whose cell may meet a are kept, cells with a center outside a are subdivided until
/// a center inside a is found, and a pruning pass drops centers whose 10^3 witness
/// points are covered by the remaining translates.
CoverCertificate covering_upper(const Body& a, const Body& b, double scale, long budget = kDefaultBudget,
                                std::uint64_t seed = 0);

/// Certificate for (A1, A3) with centers x_i + s1 * y_j and scale s1 * s2.
CoverCertificate compose_covers(const CoverCertificate& c1, const CoverCertificate& c2);

enum class SNumberKind { kolmogorov, entropy };

struct SNumberSequence {
    SNumberKind kind = SNumberKind::kolmogorov;
    /// values[k - 1] is the k-th number.
    std::vector<double> values;
    /// Volume-comparison lower bounds (entropy numbers only, else equal to values).
    std::vector<double> lower_bounds;
    Body domain;
    Body codomain;
    LinearMap map;
};

std::string to_string(SNumberKind k);

/// sup over the unit ball of the domain of |u x|_codomain (generators plus sampled rays).
double operator_norm(const LinearMap& u, const Body& domain, const Body& codomain);

/// Certified upper bounds on e_k(u : domain -> codomain), k = 1..k_max, by bisection
/// on the scale with covering_upper as the feasibility test.
SNumberSequence entropy_numbers(const LinearMap& u, const Body& domain, const Body& codomain, int k_max,
                                long budget = kDefaultBudget, std::uint64_t seed = 0);

/// d_k(u : e1 -> e2) as the singular values of A2^{1/2} U A1^{-1/2}; zero for k > n.
SNumberSequence kolmogorov_numbers_ellipsoid(const Body& e1, const Body& e2, int k_max = -1);
SNumberSequence kolmogorov_numbers_ellipsoid(const Body& e1, const Body& e2, const LinearMap& u, int k_max = -1);

/// sup_k k^alpha e_k / sup_k k^alpha d_k.
double carl_ratio(const SNumberSequence& entropy, const SNumberSequence& kolmogorov, double alpha);
double carl_ratio(const LinearMap& u, const Body& domain, const Body& codomain, double alpha, int k_max,
                  long budget = kDefaultBudget, std::uint64_t seed = 0);

struct Lemma2Check {
    double lhs = 0.0;
    double rhs = 0.0;
    double lhs_std_error = 0.0;
    double rhs_std_error = 0.0;
    std::size_t cover_size = 0;
    bool holds = true;

    double margin() const { return rhs - lhs; }
};

/// |A1 + K| <= N(A1, A2) |A2 + K| with N taken from cert (scale included); K empty means {0}.
Lemma2Check lemma2_iii_check(const Body& a1, const Body& a2, const std::optional<Body>& k, const CoverCertificate& cert,
                             long budget = kDefaultBudget, std::uint64_t seed = 0);

}  // namespace pcg
