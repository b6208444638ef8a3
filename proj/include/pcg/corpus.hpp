#pragma once

#include "pcg/body.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace pcg {

enum class Family { lp_ball, random_pconv, slab_pair, cap_body, random_ellipsoid, random_polytope };

/// Seeded description of a body corpus. `param` is the family parameter (generator
/// count, eps, condition cap or vertex count); 0 selects the family default.
struct CorpusSpec {
    Family family = Family::lp_ball;
    double param = 0.0;
    int dim = 2;
    double p = 1.0;
    int count = 1;
    std::uint64_t seed = 0;

    /// Throws InvalidBodyError / ResourceError naming the violated cap.
    void validate() const;
    /// Family with its effective parameter, e.g. "slab_pair(0.01)".
    std::string family_string() const;
    bool operator==(const CorpusSpec&) const = default;
};

std::string to_string(Family f);
/// Parses "name" or "name(param)"; throws InvalidBodyError on unknown names.
std::pair<Family, double> parse_family(const std::string& text);
/// Default parameter of a family (0 for lp_ball).
double default_param(Family f);

struct CorpusBody {
    std::string id;
    std::string descriptor;
    Body body;
};

struct CorpusPair {
    std::string id;
    std::string descriptor;
    Body first;
    Body second;
};

/// count bodies; instance i uses the stream derive_seed(seed, i).
///
/// lp_ball: StandardBall(p, n), instances after the first under random det-1 maps.
/// random_pconv(m): p-hull of m sphere points with radii in [1/2, 2]; m = 0 draws m in 8..32.
/// slab_pair(eps): the box with half-widths (1, eps, ..., eps) under random det-1 maps.
/// cap_body(eps): CapBody(n, eps, p), instances after the first under random det-1 maps.
/// random_ellipsoid(c): Q diag(d) Q^T with log-uniform spectrum of condition <= c.
/// random_polytope(v): convex hull of v sphere points with radii in [1/2, 2].
std::vector<CorpusBody> generate_bodies(const CorpusSpec& spec);

/// count pairs. slab_pair gives the orthogonal slabs (1, eps, ...) and (eps, 1, ...), the
/// first instance unmoved; lp_ball and cap_body pair the base body with independent
/// det-1 images of it (identical for the first instance); other families draw two bodies.
std::vector<CorpusPair> generate_pairs(const CorpusSpec& spec);

}  // namespace pcg
