#include <doctest.h>

#include "pcg/bodies.hpp"
#include "pcg/lp.hpp"
#include "pcg/random.hpp"

#include <cmath>

using namespace pcg;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

std::vector<Vector> unit_generators(int n) {
    std::vector<Vector> g;
    for (int i = 0; i < n; ++i) {
        g.push_back(Vector::Unit(n, i));
        g.push_back(-Vector::Unit(n, i));
    }
    return g;
}

/// Brute-force p-gauge: best nonnegative two-term decomposition over all generator pairs.
double two_term_gauge(const std::vector<Vector>& gens, const Vector& x, double p) {
    double best = INFINITY;
    for (std::size_t i = 0; i < gens.size(); ++i) {
        for (std::size_t j = i + 1; j < gens.size(); ++j) {
            Matrix m(2, 2);
            m << gens[i], gens[j];
            if (std::abs(m.determinant()) < 1e-12) continue;
            const Vector l = m.inverse() * x;
            if (l.minCoeff() < -1e-15) continue;
            best = std::min(best, std::pow(std::pow(std::abs(l(0)), p) + std::pow(std::abs(l(1)), p), 1.0 / p));
        }
        if (gens[i].normalized().dot(x.normalized()) > 1.0 - 1e-14) best = std::min(best, x.norm() / gens[i].norm());
    }
    return best;
}

Body random_pconv(Rng& rng, int n, int m, double p) {
    std::vector<Vector> g;
    for (int i = 0; i < m; ++i) g.push_back(uniform_sphere(rng, n) * uniform(rng, 0.5, 2.0));
    return Body::pconv_hull(g, p);
}

}  // namespace

TEST_CASE("linear map caches determinant and rejects singular input") {
    Matrix m(2, 2);
    m << 2, 1, 0, 3;
    LinearMap u(m);
    CHECK(u.det() == doctest::Approx(6.0).epsilon(1e-12));
    CHECK((u.inverse().matrix() * m).isIdentity(1e-12));
    CHECK(std::abs(u.unimodular().det()) == doctest::Approx(1.0).epsilon(1e-12));
    Matrix s(2, 2);
    s << 1, 2, 2, 4;
    CHECK_THROWS_AS(LinearMap{s}, InvalidBodyError);
}

TEST_CASE("gauge of elementary variants") {
    CHECK(gauge(Body::standard_ball(0.5, 2), vec({0, 0})).value == 0.0);
    CHECK(gauge(Body::box(vec({1, 1})), vec({0.5, 0.5})).value == doctest::Approx(0.5));
    CHECK(gauge(Body::euclidean_ball(3, 2.0), vec({0, 0, 1})).value == doctest::Approx(0.5));
    Matrix a = Matrix::Identity(2, 2);
    a(1, 1) = 4.0;
    CHECK(gauge(Body::ellipsoid(a), vec({0, 0.5})).value == doctest::Approx(1.0));
    CHECK(gauge(Body::standard_ball(0.5, 2), vec({1, 1})).value == doctest::Approx(4.0));
    CHECK_FALSE(gauge(Body::box(vec({1, 1})), vec({1, 1})).is_upper_bound);
}

TEST_CASE("p-convex hull of the coordinate cross is the l_p ball") {
    for (double p : {0.25, 0.5, 2.0 / 3.0, 1.0}) {
        const auto gens = unit_generators(2);
        const Body b = Body::pconv_hull(gens, p);
        for (double t : {0.1, 0.5, 1.0, 3.0}) {
            const Vector x = vec({t, t});
            const GaugeResult r = gauge(b, x);
            CHECK(r.value == doctest::Approx(t * std::pow(2.0, 1.0 / p)).epsilon(1e-9));
            CHECK(r.value == doctest::Approx(two_term_gauge(gens, x, p)).epsilon(1e-9));
            CHECK_FALSE(r.is_upper_bound);
        }
    }
}

TEST_CASE("generated gauge agrees with the two-term oracle on random planar bodies") {
    Rng rng = make_rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const double p = uniform(rng, 0.3, 1.0);
        const Body b = random_pconv(rng, 2, 7, p);
        const auto& gens = b.as<shape::PConvHull>()->generators;
        for (int k = 0; k < 20; ++k) {
            const Vector x = gaussian_vector(rng, 2);
            CHECK(gauge(b, x).value == doctest::Approx(two_term_gauge(gens, x, p)).epsilon(1e-9));
        }
    }
}

TEST_CASE("gauge certificates reassemble the query point") {
    Rng rng = make_rng(12);
    for (int n = 2; n <= 4; ++n) {
        const Body b = random_pconv(rng, n, 9, 0.5);
        const auto& gens = b.as<shape::PConvHull>()->generators;
        for (int k = 0; k < 50; ++k) {
            const Vector x = gaussian_vector(rng, n);
            const GaugeResult r = gauge(b, x);
            REQUIRE(r.certificate.has_value());
            Vector sum = Vector::Zero(n);
            double cost = 0.0;
            for (const auto& term : *r.certificate) {
                CHECK(term.coefficient >= 0.0);
                sum += term.coefficient * gens[term.generator];
                cost += std::pow(term.coefficient, 0.5);
            }
            CHECK((sum - x).norm() <= 1e-8);
            CHECK(std::abs(cost * cost - r.value) <= 1e-8 * std::max(1.0, r.value));
            CHECK(r.lower_bound <= r.value + 1e-12);
        }
    }
}

TEST_CASE("contains") {
    CHECK(contains(Body::euclidean_ball(3), vec({1, 0, 0})));
    CHECK_FALSE(contains(Body::box(vec({1, 1})), vec({1.5, 0})));
    CHECK_FALSE(contains(Body::pconv_hull(unit_generators(2), 0.5), vec({0.5, 0.5})));
    CHECK(contains(Body::pconv_hull(unit_generators(2), 0.5), vec({0.25, 0.25})));
    CHECK(membership(Body::box(vec({1, 1})), vec({2, 0})) == Membership::outside);
}

TEST_CASE("construction errors") {
    CHECK_THROWS_AS(Body::pconv_hull({vec({1, 0}), vec({-1, 0}), vec({2, 0})}, 0.5), InvalidBodyError);
    CHECK_THROWS_AS(Body::pconv_hull({vec({1, 0}), vec({0, 0})}, 0.5), InvalidBodyError);
    CHECK_THROWS_AS(Body::standard_ball(1.5, 2), InvalidBodyError);
    CHECK_THROWS_AS(Body::euclidean_ball(7), DimensionError);
    Matrix a(2, 2);
    a << 1, 0.5, 0, 1;
    CHECK_THROWS_AS(Body::ellipsoid(a), InvalidBodyError);
    a << 1, 0, 0, -1;
    CHECK_THROWS_AS(Body::ellipsoid(a), InvalidBodyError);
    CHECK_THROWS_AS(gauge(Body::euclidean_ball(2), vec({1, 2, 3})), DimensionError);
    CHECK_THROWS_AS(Body::cap_body(2, 2.0, 0.5), InvalidBodyError);
}

TEST_CASE("generator lists are deduplicated and symmetrized") {
    const Body b = Body::pconv_hull({vec({1, 0}), vec({1, 0}), vec({0, 1}), vec({-1, 0})}, 0.5);
    const auto& g = b.as<shape::PConvHull>()->generators;
    REQUIRE(g.size() == 4);
    CHECK((g[0] + g[1]).norm() == 0.0);
    CHECK((g[2] + g[3]).norm() == 0.0);
}

TEST_CASE("convex hull") {
    const Body b = Body::pconv_hull(unit_generators(2), 0.5);
    const Body h = convex_hull(b);
    REQUIRE(h.as<shape::PConvHull>());
    CHECK(h.as<shape::PConvHull>()->p == 1.0);
    CHECK(gauge(h, vec({0.3, -0.2})).value == doctest::Approx(0.5));

    // Sandwich b within hull within n^{1/p-1} b: for p = 1/2, n = 2 the factor is 2.
    const Body outer = scaled(Body::standard_ball(0.5, 2), 2.0);
    Rng rng = make_rng(3);
    for (int k = 0; k < 200; ++k) {
        const Vector x = gaussian_vector(rng, 2);
        CHECK(gauge_value(outer, x) <= gauge_value(convex_hull(Body::standard_ball(0.5, 2)), x) + 1e-12);
    }
    const Body ball = Body::euclidean_ball(3);
    for (int k = 0; k < 100; ++k) {
        const Vector x = gaussian_vector(rng, 3);
        CHECK(gauge_value(convex_hull(ball), x) == gauge_value(ball, x));
    }
    CHECK(convex_hull(Body::cap_body(3, 0.3, 0.5)).is_convex());
}

TEST_CASE("polar bodies") {
    const Body ball = Body::euclidean_ball(3);
    CHECK(polar(ball).as<shape::EuclideanBall>()->radius == 1.0);
    const Body cross = polar(Body::box(vec({1, 1})));
    Rng rng = make_rng(5);
    for (int k = 0; k < 50; ++k) {
        const Vector y = gaussian_vector(rng, 2);
        CHECK(gauge_value(cross, y) == doctest::Approx(y.lpNorm<1>()).epsilon(1e-12));
    }
    Matrix a(2, 2);
    a << 2, 0.3, 0.3, 1;
    const Body e = Body::ellipsoid(a);
    CHECK((polar(e).as<shape::Ellipsoid>()->shape - a.inverse()).norm() < 1e-12);

    // Polar of a p-convex hull equals the polar of its convex hull.
    for (int trial = 0; trial < 5; ++trial) {
        const Body b = random_pconv(rng, 3, 8, 0.5);
        const Body p1 = polar(b);
        const Body p2 = polar(convex_hull(b));
        for (int k = 0; k < 100; ++k) {
            const Vector y = uniform_sphere(rng, 3);
            CHECK(gauge_value(p1, y) == doctest::Approx(gauge_value(p2, y)).epsilon(1e-9));
        }
    }
}

TEST_CASE("support function matches the polar gauge") {
    Rng rng = make_rng(6);
    Matrix a(3, 3);
    a << 2, 0.3, 0.1, 0.3, 1, 0.2, 0.1, 0.2, 3;
    const std::vector<Body> bodies = {
        Body::standard_ball(0.5, 3, 1.5),        Body::box(vec({1, 2, 0.5})),
        Body::ellipsoid(a),                      random_pconv(rng, 3, 10, 0.5),
        polar(random_pconv(rng, 3, 6, 1.0)),     Body::cap_body(3, 0.4, 0.5),
        Body::cap_polar(3, 0.4),                 transformed(random_unimodular(rng, 3), Body::box(vec({1, 1, 1}))),
    };
    for (const auto& b : bodies) {
        const Body q = polar(b);
        for (int k = 0; k < 50; ++k) {
            const Vector t = gaussian_vector(rng, 3);
            CHECK(support(b, t) == doctest::Approx(gauge_value(q, t)).epsilon(1e-9));
        }
    }
}

TEST_CASE("bipolar of polytopal bodies is the convex hull") {
    Rng rng = make_rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        const Body b = random_pconv(rng, 3, 7, 0.5);
        const Body bb = polar(polar(b));
        const Body h = convex_hull(b);
        for (int k = 0; k < 100; ++k) {
            const Vector y = uniform_sphere(rng, 3);
            CHECK(gauge_value(bb, y) == doctest::Approx(gauge_value(h, y)).epsilon(1e-6));
        }
    }
    const Body box = Body::box(vec({1, 2}));
    const Body bb = polar(polar(box));
    for (int k = 0; k < 100; ++k) {
        const Vector y = uniform_sphere(rng, 2);
        CHECK(gauge_value(bb, y) == doctest::Approx(gauge_value(box, y)).epsilon(1e-9));
    }
}

TEST_CASE("homogeneity, symmetry and the p-triangle inequality") {
    Rng rng = make_rng(8);
    Matrix a(2, 2);
    a << 1, 0.2, 0.2, 3;
    const std::vector<Body> bodies = {
        Body::standard_ball(0.5, 2),  Body::euclidean_ball(2, 2.0),  Body::ellipsoid(a),
        Body::box(vec({1, 3})),       random_pconv(rng, 2, 6, 0.6),  Body::cap_body(2, 0.3, 0.5),
        Body::cap_polar(2, 0.3),      transformed(random_unimodular(rng, 2), Body::standard_ball(0.5, 2)),
    };
    for (const auto& b : bodies) {
        for (int k = 0; k < 100; ++k) {
            const Vector x = gaussian_vector(rng, 2);
            const double t = uniform(rng, -3.0, 3.0);
            CHECK(gauge_value(b, t * x) == doctest::Approx(std::abs(t) * gauge_value(b, x)).epsilon(1e-9));
            CHECK(gauge_value(b, -x) == gauge_value(b, x));
        }
        if (!has_exact_gauge(b)) continue;
        const double p = b.p();
        for (int k = 0; k < 1000; ++k) {
            const Vector x = gaussian_vector(rng, 2);
            const Vector y = gaussian_vector(rng, 2);
            CHECK(std::pow(gauge_value(b, x + y), p) <=
                  std::pow(gauge_value(b, x), p) + std::pow(gauge_value(b, y), p) + 1e-9);
        }
    }
}

TEST_CASE("sandwich between a generated body and its convex hull") {
    Rng rng = make_rng(9);
    for (int n = 2; n <= 4; ++n) {
        const double p = 0.5;
        const Body b = random_pconv(rng, n, 8, p);
        const Body h = convex_hull(b);
        const double factor = std::pow(n, 1.0 / p - 1.0);
        for (int k = 0; k < 200; ++k) {
            const Vector x = uniform_sphere(rng, n);
            const double gb = gauge_value(b, x);
            const double gh = gauge_value(h, x);
            CHECK(gh <= gb + 1e-12);
            CHECK(gb <= factor * gh + 1e-9);
        }
    }
}

TEST_CASE("cap body gauge against a two-generator grid search") {
    for (double eps : {0.2, 0.5, 1.0}) {
        for (double p : {0.5, 0.75}) {
            const Body b = Body::cap_body(2, eps, p);
            for (double theta : {0.0, 0.3 * eps, 0.7 * eps, 0.99 * eps, 1.2 * eps}) {
                const Vector x = vec({std::sin(theta), std::cos(theta)});
                // Grid over pairs of allowed directions (angles from e_2) on both sides.
                double best = INFINITY;
                const int steps = 400;
                for (int i = 0; i <= steps; ++i) {
                    const double a1 = eps + (M_PI - 2 * eps) * i / steps;
                    for (int j = 0; j <= steps; ++j) {
                        const double a2 = eps + (M_PI - 2 * eps) * j / steps;
                        Matrix m(2, 2);
                        m << std::sin(a1), -std::sin(a2), std::cos(a1), std::cos(a2);
                        if (std::abs(m.determinant()) < 1e-9) continue;
                        const Vector l = m.inverse() * x;
                        if (l.minCoeff() < 0) continue;
                        best = std::min(best, std::pow(std::pow(l(0), p) + std::pow(l(1), p), 1.0 / p));
                    }
                }
                if (theta >= eps) best = 1.0;
                const GaugeResult r = gauge(b, x);
                CHECK(r.value <= best + 1e-9);
                CHECK(r.value >= best - 1e-3);
                CHECK(r.lower_bound <= r.value + 1e-12);
            }
        }
    }
}

TEST_CASE("cap body gauge is not beaten by random three-generator decompositions in 3D") {
    Rng rng = make_rng(10);
    const double eps = 0.4;
    const double p = 0.5;
    const Body b = Body::cap_body(3, eps, p);
    for (int k = 0; k < 10; ++k) {
        const double theta = uniform(rng, 0.0, eps);
        const double phi = uniform(rng, 0.0, 2 * M_PI);
        const Vector x = vec({std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)});
        const double g = gauge_value(b, x);
        for (int trial = 0; trial < 3000; ++trial) {
            Matrix m(3, 3);
            for (int c = 0; c < 3; ++c) {
                Vector u;
                do {
                    u = uniform_sphere(rng, 3);
                } while (std::acos(std::min(1.0, std::abs(u(2)))) < eps);
                m.col(c) = u;
            }
            if (std::abs(m.determinant()) < 1e-6) continue;
            const Vector l = (m.inverse() * x).cwiseAbs();
            const double cost = std::pow(l.array().pow(p).sum(), 1.0 / p);
            CHECK(g <= cost + 1e-9);
        }
    }
}

TEST_CASE("transformed bodies") {
    Rng rng = make_rng(13);
    const LinearMap u = random_unimodular(rng, 3);
    const Body inner = Body::standard_ball(0.5, 3);
    const Body t = transformed(u, inner);
    for (int k = 0; k < 50; ++k) {
        const Vector x = gaussian_vector(rng, 3);
        CHECK(gauge_value(t, u.apply(x)) == doctest::Approx(gauge_value(inner, x)).epsilon(1e-9));
    }
    CHECK(transformed(u, Body::euclidean_ball(3)).as<shape::Ellipsoid>());
    CHECK(transformed(LinearMap::diagonal(vec({2, 3})), Body::box(vec({1, 1}))).as<shape::Box>());
    CHECK(scaled(Body::euclidean_ball(2), 2.0).as<shape::EuclideanBall>()->radius == 2.0);
    CHECK(transformed(u.inverse(), t).as<shape::Transformed>() != nullptr);
    CHECK(scaled(Body::standard_ball(0.5, 2), 3.0).as<shape::StandardBall>()->radius == 3.0);
}

TEST_CASE("balanced kernel") {
    const Body disk = Body::euclidean_ball(2);
    const Vector shift = vec({0.5, 0});
    auto shifted = [&](const Vector& y) { return contains(disk, y + shift); };
    CHECK(balanced_kernel_contains([&](const Vector& y) { return contains(disk, y); }, vec({0.6, 0.7}), 21));
    CHECK_FALSE(balanced_kernel_contains(shifted, vec({1.2, 0}), 21));
    CHECK(contains(disk, vec({1.2, 0}) * -1.0 + shift) == true);  // direct check: t = -1 is inside
    CHECK_FALSE(contains(disk, vec({1.2, 0}) + shift));            // t = 1 is outside
    CHECK(balanced_kernel_contains(shifted, vec({0, 0}), 2));
    CHECK_THROWS_AS(balanced_kernel_contains(shifted, vec({0, 0}), 1), InvalidBodyError);
}

TEST_CASE("Aoki-Rolewicz exponent") {
    CHECK(aoki_rolewicz_exponent(1.0) == doctest::Approx(1.0));
    CHECK(aoki_rolewicz_exponent(2.0) == doctest::Approx(0.5));
    CHECK(aoki_rolewicz_exponent(8.0) == doctest::Approx(0.25));
    CHECK_THROWS_AS(aoki_rolewicz_exponent(0.5), InvalidBodyError);
}

TEST_CASE("quasi-norm constant estimate") {
    const double box = quasi_norm_constant_estimate(Body::box(vec({1, 2, 3})), 2000, 1);
    CHECK(box <= 1.0 + 1e-9);
    CHECK(box >= 1.0 - 1e-9);
    const Body lp = Body::standard_ball(0.5, 2);
    // Direct evaluation of the extremal pair x = e1, y = e2.
    CHECK(gauge_value(lp, vec({1, 1})) / (gauge_value(lp, vec({1, 0})) + gauge_value(lp, vec({0, 1}))) == 2.0);
    double prev = 0.0;
    for (long s : {10L, 100L, 1000L, 20000L}) {
        const double c = quasi_norm_constant_estimate(lp, s, 2);
        CHECK(c <= 2.0 + 1e-12);
        CHECK(c >= prev - 1e-12);
        prev = c;
    }
    CHECK(prev > 1.95);
    for (double p : {0.3, 0.7}) {
        CHECK(quasi_norm_constant_estimate(Body::standard_ball(p, 3), 3000, 3) <= std::pow(2.0, 1.0 / p - 1.0) + 1e-9);
    }
    CHECK(quasi_norm_constant_estimate(lp, 500, 4) == quasi_norm_constant_estimate(lp, 500, 4));
}

TEST_CASE("standard-form linear programs") {
    // min -x1 - x2  s.t.  x1 + 2 x2 + s1 = 4,  3 x1 + x2 + s2 = 6
    Matrix a(2, 4);
    a << 1, 2, 1, 0, 3, 1, 0, 1;
    Vector b = vec({4, 6});
    Vector c = vec({-1, -1, 0, 0});
    const LpResult r = solve_standard_lp(a, b, c);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.value == doctest::Approx(-2.8));
    CHECK(r.x(0) == doctest::Approx(1.6));
    CHECK(r.x(1) == doctest::Approx(1.2));
    Matrix inf(1, 1);
    inf << 1;
    CHECK(solve_standard_lp(inf, vec({-1}), vec({1})).status == LpStatus::infeasible);
    Matrix unb(1, 2);
    unb << 1, -1;
    CHECK(solve_standard_lp(unb, vec({1}), vec({0, -1})).status == LpStatus::unbounded);
}
