#include "pcg/bodies.hpp"
#include "pcg/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace pcg {

namespace {

void check_point(const Body& b, const Vector& x, const char* who) {
    if (x.size() != b.dim()) {
        throw DimensionError(fmt::format("{}: point has dimension {}, body has {}", who, x.size(), b.dim()));
    }
    if (!x.allFinite()) throw InvalidBodyError(fmt::format("{}: point has non-finite entries", who));
}

double lp_quasi_norm(const Vector& x, double p) {
    const double m = x.lpNorm<Eigen::Infinity>();
    if (m == 0.0) return 0.0;
    if (p == 1.0) return x.lpNorm<1>();
    double s = 0.0;
    for (int i = 0; i < x.size(); ++i) s += std::pow(std::abs(x(i)) / m, p);
    return m * std::pow(s, 1.0 / p);
}

/// Radial/axial split about e_n: returns (rho, z) with z = |x_n|.
std::pair<double, double> axial_split(const Vector& x) {
    const int n = static_cast<int>(x.size());
    const double z = std::abs(x(n - 1));
    const double rho = x.head(n - 1).norm();
    return {rho, z};
}

double cap_hull_gauge(const Vector& x, double eps) {
    const auto [rho, z] = axial_split(x);
    return std::max(std::hypot(rho, z), z / std::cos(eps));
}

double cap_polar_gauge(const Vector& x, double eps) {
    const auto [rho, z] = axial_split(x);
    if (std::atan2(rho, z) >= eps) return std::hypot(rho, z);
    return rho * std::sin(eps) + z * std::cos(eps);
}

/// Cost of writing a point at polar angle theta and radius r as a nonnegative
/// combination of the unit generators at angles phi1 and -phi2.
double cap_pair_cost(double r, double theta, double phi1, double phi2, double p) {
    const double s = std::sin(phi1 + phi2);
    const double l1 = r * std::sin(theta + phi2) / s;
    const double l2 = r * std::sin(phi1 - theta) / s;
    if (l1 < 0.0 || l2 < 0.0) return std::numeric_limits<double>::infinity();
    if (p == 1.0) return l1 + l2;
    if (p == 0.5) {
        const double t = std::sqrt(l1) + std::sqrt(l2);
        return t * t;
    }
    return std::pow(std::pow(l1, p) + std::pow(l2, p), 1.0 / p);
}

/// Upper bound on the CapBody gauge inside the cap cone, by a 1-parameter search with
/// one generator pinned to the cap edge.
double cap_gauge_search(double r, double theta, double eps, double p) {
    constexpr int kGrid = 64;
    const double lo = eps;
    const double hi = M_PI - eps - 1e-12;
    double best = std::numeric_limits<double>::infinity();
    for (int role = 0; role < 2; ++role) {
        auto cost = [&](double phi) {
            return role == 0 ? cap_pair_cost(r, theta, eps, phi, p) : cap_pair_cost(r, theta, phi, eps, p);
        };
        int arg = 0;
        double val = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= kGrid; ++i) {
            const double c = cost(lo + (hi - lo) * i / kGrid);
            if (c < val) {
                val = c;
                arg = i;
            }
        }
        double a = lo + (hi - lo) * std::max(arg - 1, 0) / kGrid;
        double b = lo + (hi - lo) * std::min(arg + 1, kGrid) / kGrid;
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        double c = b - g * (b - a);
        double d = a + g * (b - a);
        double fc = cost(c);
        double fd = cost(d);
        for (int it = 0; it < 48; ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = cost(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = cost(d);
            }
        }
        best = std::min({best, val, fc, fd});
    }
    return best;
}

GaugeResult exact(double v) {
    GaugeResult r;
    r.value = v;
    r.lower_bound = v;
    return r;
}

GaugeResult gauge_impl(const Body& b, const Vector& x, bool want_certificate) {
    struct Visitor {
        const Body& b;
        const Vector& x;
        bool cert;

        GaugeResult operator()(const shape::StandardBall& s) const {
            GaugeResult r = exact(lp_quasi_norm(x, s.p) / s.radius);
            r.lower_bound = x.lpNorm<1>() / s.radius;
            return r;
        }
        GaugeResult operator()(const shape::EuclideanBall& s) const { return exact(x.norm() / s.radius); }
        GaugeResult operator()(const shape::Ellipsoid& s) const {
            return exact(std::sqrt(std::max(0.0, x.dot(s.shape * x))));
        }
        GaugeResult operator()(const shape::Box& s) const {
            return exact(x.cwiseAbs().cwiseQuotient(s.half_widths).maxCoeff());
        }
        GaugeResult operator()(const shape::PConvHull& s) const {
            GaugeResult r;
            if (x.isZero(0.0)) {
                if (cert) r.certificate.emplace();
                return r;
            }
            const auto res = b.data().solver->solve(x, s.p, cert);
            r.value = res.cost_p;
            r.lower_bound = std::min(res.cost_1, res.cost_p);
            if (cert) {
                std::vector<GaugeTerm> terms;
                for (std::size_t i = 0; i < res.support.size(); ++i) {
                    const double l = res.coefficients(static_cast<int>(i));
                    if (l == 0.0) continue;
                    const std::size_t k = static_cast<std::size_t>(res.support[i]);
                    terms.push_back({std::abs(l), l > 0 ? 2 * k : 2 * k + 1});
                }
                r.certificate = std::move(terms);
            }
            return r;
        }
        GaugeResult operator()(const shape::Polytope& s) const {
            double v = 0.0;
            for (const auto& a : s.normals) v = std::max(v, std::abs(a.dot(x)));
            return exact(v);
        }
        GaugeResult operator()(const shape::CapBody& s) const {
            const double hull = cap_hull_gauge(x, s.eps);
            GaugeResult r = exact(hull);
            if (s.p == 1.0) return r;
            const auto [rho, z] = axial_split(x);
            const double radius = std::hypot(rho, z);
            const double theta = std::atan2(rho, z);
            if (radius == 0.0 || theta >= s.eps) {
                r.value = radius;
                return r;
            }
            r.value = std::max(hull, cap_gauge_search(radius, theta, s.eps, s.p));
            r.is_upper_bound = true;
            return r;
        }
        GaugeResult operator()(const shape::CapPolar& s) const { return exact(cap_polar_gauge(x, s.eps)); }
        GaugeResult operator()(const shape::Transformed& s) const {
            GaugeResult r = gauge_impl(*s.inner, s.map.apply_inverse(x), false);
            return r;
        }
    };
    return std::visit(Visitor{b, x, want_certificate}, b.shape());
}

}  // namespace

GaugeResult gauge(const Body& b, const Vector& x) {
    check_point(b, x, "gauge");
    return gauge_impl(b, x, true);
}

double gauge_value(const Body& b, const Vector& x) {
    check_point(b, x, "gauge");
    return gauge_impl(b, x, false).value;
}

Membership membership(const Body& b, const Vector& x) {
    check_point(b, x, "membership");
    const GaugeResult r = gauge_impl(b, x, false);
    if (r.value <= 1.0) return Membership::inside;
    if (r.is_upper_bound && r.lower_bound <= 1.0) return Membership::indeterminate;
    return Membership::outside;
}

bool contains(const Body& b, const Vector& x) {
    if (const auto* c = b.as<shape::CapBody>()) {
        check_point(b, x, "contains");
        if (cap_hull_gauge(x, c->eps) > 1.0) return false;
    }
    return gauge_value(b, x) <= 1.0;
}

bool has_exact_gauge(const Body& b) {
    if (const auto* c = b.as<shape::CapBody>()) return c->p == 1.0;
    if (const auto* t = b.as<shape::Transformed>()) return has_exact_gauge(*t->inner);
    return true;
}

double support(const Body& b, const Vector& theta) {
    check_point(b, theta, "support");
    struct Visitor {
        const Body& b;
        const Vector& t;
        double operator()(const shape::StandardBall& s) const { return s.radius * t.lpNorm<Eigen::Infinity>(); }
        double operator()(const shape::EuclideanBall& s) const { return s.radius * t.norm(); }
        double operator()(const shape::Ellipsoid&) const {
            return std::sqrt(std::max(0.0, t.dot(b.data().ellipsoid_inverse * t)));
        }
        double operator()(const shape::Box& s) const { return s.half_widths.dot(t.cwiseAbs()); }
        double operator()(const shape::PConvHull& s) const {
            double v = 0.0;
            for (std::size_t i = 0; i < s.generators.size(); i += 2) v = std::max(v, std::abs(s.generators[i].dot(t)));
            return v;
        }
        double operator()(const shape::Polytope&) const {
            if (t.isZero(0.0)) return 0.0;
            return b.data().dual_solver->solve(t, 1.0, false).cost_1;
        }
        double operator()(const shape::CapBody& s) const { return cap_polar_gauge(t, s.eps); }
        double operator()(const shape::CapPolar& s) const { return cap_hull_gauge(t, s.eps); }
        double operator()(const shape::Transformed& s) const {
            return support(*s.inner, s.map.matrix().transpose() * t);
        }
    };
    return std::visit(Visitor{b, theta}, b.shape());
}

Vector axis_extents(const Body& b) {
    const int n = b.dim();
    Vector h(n);
    for (int i = 0; i < n; ++i) h(i) = support(b, Vector::Unit(n, i));
    return h;
}

std::optional<Matrix> ellipsoid_shape(const Body& b) {
    if (const auto* e = b.as<shape::EuclideanBall>()) {
        return Matrix(Matrix::Identity(e->n, e->n) / (e->radius * e->radius));
    }
    if (const auto* e = b.as<shape::Ellipsoid>()) return e->shape;
    if (const auto* t = b.as<shape::Transformed>()) {
        if (auto a = ellipsoid_shape(*t->inner)) {
            const Matrix& mi = t->map.inverse_matrix();
            Matrix s = mi.transpose() * *a * mi;
            return Matrix(0.5 * (s + s.transpose()));
        }
    }
    return std::nullopt;
}

Body transformed(const LinearMap& map, const Body& b) {
    if (map.dim() != b.dim()) throw DimensionError("transformed: dimension mismatch");
    const int n = b.dim();
    const Matrix& m = map.matrix();
    if (m.isIdentity(0.0)) return b;
    if (const auto* t = b.as<shape::Transformed>()) return transformed(map.compose(t->map), *t->inner);

    const double scale = m.cwiseAbs().maxCoeff();
    const bool diagonal = map.is_diagonal(0.0);
    const bool scalar = diagonal && (m.diagonal().array().abs() - std::abs(m(0, 0))).abs().maxCoeff() <= 0.0;
    const Matrix mtm = m.transpose() * m;
    const double s2 = mtm.trace() / n;
    const bool conformal = (mtm - s2 * Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-14 * scale * scale;

    if (const auto* e = b.as<shape::EuclideanBall>()) {
        if (conformal) return Body::euclidean_ball(n, e->radius * std::sqrt(s2));
        return transformed(map, Body::ellipsoid(*ellipsoid_shape(b)));
    }
    if (const auto* e = b.as<shape::Ellipsoid>()) {
        const Matrix& mi = map.inverse_matrix();
        Matrix s = mi.transpose() * e->shape * mi;
        return Body::ellipsoid(0.5 * (s + s.transpose()));
    }
    if (const auto* x = b.as<shape::Box>(); x && diagonal) {
        return Body::box(x->half_widths.cwiseProduct(m.diagonal().cwiseAbs()));
    }
    if (const auto* x = b.as<shape::StandardBall>(); x && scalar) {
        return Body::standard_ball(x->p, x->n, x->radius * std::abs(m(0, 0)));
    }
    if (const auto* x = b.as<shape::PConvHull>(); x && scalar) {
        std::vector<Vector> g;
        for (std::size_t i = 0; i < x->generators.size(); i += 2) g.push_back(m(0, 0) * x->generators[i]);
        return Body::pconv_hull(g, x->p);
    }
    return Body::transformed(map, b);
}

Body scaled(const Body& b, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidBodyError("scaled: factor must be positive");
    if (t == 1.0) return b;
    return transformed(LinearMap::scaling(b.dim(), t), b);
}

Body convex_hull(const Body& b) {
    struct Visitor {
        const Body& b;
        Body operator()(const shape::StandardBall& s) const {
            return s.p == 1.0 ? b : Body::standard_ball(1.0, s.n, s.radius);
        }
        Body operator()(const shape::PConvHull& s) const {
            if (s.p == 1.0) return b;
            std::vector<Vector> g;
            for (std::size_t i = 0; i < s.generators.size(); i += 2) g.push_back(s.generators[i]);
            return Body::pconv_hull(g, 1.0);
        }
        Body operator()(const shape::CapBody& s) const { return s.p == 1.0 ? b : Body::cap_body(s.n, s.eps, 1.0); }
        Body operator()(const shape::Transformed& s) const {
            if (s.inner->is_convex()) return b;
            return Body::transformed(s.map, convex_hull(*s.inner));
        }
        Body operator()(const shape::EuclideanBall&) const { return b; }
        Body operator()(const shape::Ellipsoid&) const { return b; }
        Body operator()(const shape::Box&) const { return b; }
        Body operator()(const shape::Polytope&) const { return b; }
        Body operator()(const shape::CapPolar&) const { return b; }
    };
    return std::visit(Visitor{b}, b.shape());
}

Body polar(const Body& b) {
    struct Visitor {
        const Body& b;
        Body operator()(const shape::StandardBall& s) const {
            return Body::box(Vector::Constant(s.n, 1.0 / s.radius));
        }
        Body operator()(const shape::EuclideanBall& s) const { return Body::euclidean_ball(s.n, 1.0 / s.radius); }
        Body operator()(const shape::Ellipsoid&) const { return Body::ellipsoid(b.data().ellipsoid_inverse); }
        Body operator()(const shape::Box& s) const {
            const int n = static_cast<int>(s.half_widths.size());
            const Vector inv = s.half_widths.cwiseInverse();
            if ((inv.array() == inv(0)).all()) return Body::standard_ball(1.0, n, inv(0));
            return Body::transformed(LinearMap::diagonal(inv), Body::standard_ball(1.0, n, 1.0));
        }
        Body operator()(const shape::PConvHull& s) const {
            std::vector<Vector> normals;
            for (std::size_t i = 0; i < s.generators.size(); i += 2) normals.push_back(s.generators[i]);
            return Body::polytope(normals);
        }
        Body operator()(const shape::Polytope& s) const { return Body::pconv_hull(s.normals, 1.0); }
        Body operator()(const shape::CapBody& s) const { return Body::cap_polar(s.n, s.eps); }
        Body operator()(const shape::CapPolar& s) const { return Body::cap_body(s.n, s.eps, 1.0); }
        Body operator()(const shape::Transformed& s) const {
            return transformed(s.map.inverse_transpose(), polar(*s.inner));
        }
    };
    return std::visit(Visitor{b}, b.shape());
}

bool balanced_kernel_contains(const std::function<bool(const Vector&)>& oracle, const Vector& x, int t_grid) {
    if (t_grid < 2) throw InvalidBodyError("balanced_kernel_contains: t_grid must be at least 2");
    for (int k = 0; k < t_grid; ++k) {
        const double t = -1.0 + 2.0 * k / (t_grid - 1);
        if (!oracle(t * x)) return false;
    }
    return true;
}

double aoki_rolewicz_exponent(double c) {
    if (!(c >= 1.0) || !std::isfinite(c)) throw InvalidBodyError("aoki_rolewicz_exponent: constant must be >= 1");
    return 1.0 / std::log2(2.0 * c);
}

double quasi_norm_constant_estimate(const Body& b, long samples, std::uint64_t seed) {
    if (samples < 1) throw InvalidBodyError("quasi_norm_constant_estimate: samples must be >= 1");
    const int n = b.dim();
    Rng rng = make_rng(seed, 0x71);
    auto draw = [&] {
        // Sparse draws reach the extremal pairs of coordinate-generated bodies.
        while (true) {
            Vector v = gaussian_vector(rng, n);
            for (int i = 0; i < n; ++i) {
                if (uniform01(rng) < 0.5) v(i) = 0.0;
            }
            if (!v.isZero(0.0)) return v;
        }
    };
    const Vector x0 = draw();
    double best = gauge_value(b, 2.0 * x0) / (2.0 * gauge_value(b, x0));
    for (long s = 1; s < samples; ++s) {
        const Vector x = draw();
        const Vector y = draw();
        const double den = gauge_value(b, x) + gauge_value(b, y);
        best = std::max(best, gauge_value(b, x + y) / den);
    }
    return best;
}

}  // namespace pcg
