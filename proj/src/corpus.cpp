#include "pcg/corpus.hpp"

#include "pcg/bodies.hpp"
#include "pcg/random.hpp"

#include <fmt/format.h>

#include <cmath>

namespace pcg {

namespace {

constexpr int kMaxCount = 10'000;
constexpr int kMaxRepresentatives = kMaxGenerators / 2;
constexpr double kRandomMapCondition = 20.0;

struct FamilyName {
    Family family;
    const char* name;
};

constexpr FamilyName kFamilies[] = {
    {Family::lp_ball, "lp_ball"},
    {Family::random_pconv, "random_pconv"},
    {Family::slab_pair, "slab_pair"},
    {Family::cap_body, "cap_body"},
    {Family::random_ellipsoid, "random_ellipsoid"},
    {Family::random_polytope, "random_polytope"},
};

double effective_param(const CorpusSpec& s) { return s.param != 0.0 ? s.param : default_param(s.family); }

Body random_hull(Rng& rng, int n, int m, double p) {
    std::vector<Vector> g;
    g.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) g.push_back(uniform_sphere(rng, n) * uniform(rng, 0.5, 2.0));
    return Body::pconv_hull(g, p);
}

Body random_ellipsoid(Rng& rng, int n, double cond) {
    const double half = 0.5 * std::log(cond);
    Vector d(n);
    for (int i = 0; i < n; ++i) d(i) = std::exp(uniform(rng, -half, half));
    const Matrix q = random_orthogonal(rng, n);
    return Body::ellipsoid(q * d.asDiagonal() * q.transpose());
}

Body slab(int n, double eps, int long_axis) {
    Vector w = Vector::Constant(n, eps);
    w(long_axis) = 1.0;
    return Body::box(w);
}

Body base_body(const CorpusSpec& s) {
    switch (s.family) {
        case Family::lp_ball:
            return Body::standard_ball(s.p, s.dim);
        case Family::cap_body:
            return Body::cap_body(s.dim, effective_param(s), s.p);
        case Family::slab_pair:
            return slab(s.dim, effective_param(s), 0);
        default:
            throw UnsupportedError("corpus: family has no base body");
    }
}

/// Fresh body from an instance stream for the random families.
Body draw(const CorpusSpec& s, Rng& rng) {
    const double param = effective_param(s);
    switch (s.family) {
        case Family::random_pconv: {
            const int m = param > 0.0 ? static_cast<int>(param) : 8 + static_cast<int>(uniform01(rng) * 25.0);
            return random_hull(rng, s.dim, m, s.p);
        }
        case Family::random_polytope:
            return random_hull(rng, s.dim, static_cast<int>(param), 1.0);
        case Family::random_ellipsoid:
            return random_ellipsoid(rng, s.dim, param);
        default:
            throw UnsupportedError("corpus: family is not random");
    }
}

bool has_base(Family f) { return f == Family::lp_ball || f == Family::cap_body || f == Family::slab_pair; }

std::string instance_id(std::size_t i) { return fmt::format("{:04d}", i); }

}  // namespace

std::string to_string(Family f) {
    for (const auto& e : kFamilies) {
        if (e.family == f) return e.name;
    }
    return "unknown";
}

double default_param(Family f) {
    switch (f) {
        case Family::lp_ball:
            return 0.0;
        case Family::random_pconv:
            return 0.0;
        case Family::slab_pair:
            return 0.01;
        case Family::cap_body:
            return 0.3;
        case Family::random_ellipsoid:
            return kRandomMapCondition;
        case Family::random_polytope:
            return 8.0;
    }
    return 0.0;
}

std::pair<Family, double> parse_family(const std::string& text) {
    std::string name = text;
    double param = 0.0;
    if (const auto open = text.find('('); open != std::string::npos) {
        if (text.back() != ')') throw InvalidBodyError(fmt::format("malformed family '{}'", text));
        name = text.substr(0, open);
        const std::string arg = text.substr(open + 1, text.size() - open - 2);
        std::size_t used = 0;
        try {
            param = std::stod(arg, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != arg.size()) throw InvalidBodyError(fmt::format("malformed family parameter '{}'", arg));
    }
    for (const auto& e : kFamilies) {
        if (name == e.name) return {e.family, param};
    }
    throw InvalidBodyError(fmt::format("unknown family '{}'", name));
}

std::string CorpusSpec::family_string() const {
    const double param = effective_param(*this);
    if (family == Family::lp_ball || (family == Family::random_pconv && param == 0.0)) return to_string(family);
    return fmt::format("{}({})", to_string(family), param);
}

void CorpusSpec::validate() const {
    if (dim < 2 || dim > kMaxExperimentDimension) {
        throw DimensionError(fmt::format("dimension {} outside the dimension cap [2, {}]", dim, kMaxExperimentDimension));
    }
    if (!(p > 0.0 && p <= 1.0)) throw InvalidBodyError(fmt::format("p = {} outside (0, 1]", p));
    if (count < 1) throw InvalidBodyError(fmt::format("count = {} must be at least 1", count));
    if (count > kMaxCount) throw ResourceError(fmt::format("count {} exceeds the instance cap of {}", count, kMaxCount));
    const double param = effective_param(*this);
    switch (family) {
        case Family::lp_ball:
            if (this->param != 0.0) throw InvalidBodyError("lp_ball takes no parameter");
            break;
        case Family::random_pconv:
        case Family::random_polytope:
            if (param != 0.0 && (param != std::floor(param) || param < dim)) {
                throw InvalidBodyError(fmt::format("generator count {} must be an integer >= dimension {}", param, dim));
            }
            if (param > kMaxRepresentatives) {
                throw ResourceError(fmt::format("generator count {} exceeds the cap of {} (= {} symmetric generators)",
                                                param, kMaxRepresentatives, kMaxGenerators));
            }
            break;
        case Family::slab_pair:
            if (!(param > 0.0 && param <= 1.0)) throw InvalidBodyError(fmt::format("slab eps = {} outside (0, 1]", param));
            break;
        case Family::cap_body:
            if (!(param > 0.0 && param < M_PI / 2.0)) {
                throw InvalidBodyError(fmt::format("cap eps = {} outside (0, pi/2)", param));
            }
            break;
        case Family::random_ellipsoid:
            if (!(param >= 1.0)) throw InvalidBodyError(fmt::format("condition cap {} must be >= 1", param));
            break;
    }
}

std::vector<CorpusBody> generate_bodies(const CorpusSpec& spec) {
    spec.validate();
    std::vector<CorpusBody> out;
    const std::string fam = spec.family_string();
    for (int i = 0; i < spec.count; ++i) {
        Rng rng = make_rng(spec.seed, static_cast<std::uint64_t>(i));
        const auto id = instance_id(static_cast<std::size_t>(i));
        if (has_base(spec.family)) {
            Body b = base_body(spec);
            std::string desc = fmt::format("{} p={} n={}", fam, spec.p, spec.dim);
            if (i > 0) {
                b = transformed(random_unimodular(rng, spec.dim, kRandomMapCondition), b);
                desc += " under a random det-1 map";
            }
            out.push_back({id, desc, b});
        } else {
            Body b = draw(spec, rng);
            out.push_back({id, fmt::format("{} p={} n={}: {}", fam, spec.p, spec.dim, b.describe()), b});
        }
    }
    return out;
}

std::vector<CorpusPair> generate_pairs(const CorpusSpec& spec) {
    spec.validate();
    std::vector<CorpusPair> out;
    const std::string fam = spec.family_string();
    for (int i = 0; i < spec.count; ++i) {
        Rng rng = make_rng(spec.seed, static_cast<std::uint64_t>(i));
        const auto id = instance_id(static_cast<std::size_t>(i));
        const std::string head = fmt::format("{} p={} n={}", fam, spec.p, spec.dim);
        if (spec.family == Family::slab_pair) {
            Body a = slab(spec.dim, effective_param(spec), 0);
            Body b = slab(spec.dim, effective_param(spec), 1);
            std::string desc = head + ": orthogonal slabs";
            if (i > 0) {
                a = transformed(random_unimodular(rng, spec.dim, kRandomMapCondition), a);
                b = transformed(random_unimodular(rng, spec.dim, kRandomMapCondition), b);
                desc += " under random det-1 maps";
            }
            out.push_back({id, desc, a, b});
        } else if (has_base(spec.family)) {
            const Body base = base_body(spec);
            if (i == 0) {
                out.push_back({id, head + ": identical pair", base, base});
            } else {
                const LinearMap v = random_unimodular(rng, spec.dim, kRandomMapCondition);
                const LinearMap w = random_unimodular(rng, spec.dim, kRandomMapCondition);
                out.push_back({id, head + ": independent det-1 images", transformed(v, base), transformed(w, base)});
            }
        } else {
            Body a = draw(spec, rng);
            Body b = draw(spec, rng);
            out.push_back({id, fmt::format("{}: {} + {}", head, a.describe(), b.describe()), a, b});
        }
    }
    return out;
}

}  // namespace pcg
