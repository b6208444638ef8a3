#include <doctest.h>

#include "pcg/bodies.hpp"
#include "pcg/metric.hpp"
#include "pcg/random.hpp"

#include <cmath>
#include <functional>

using namespace pcg;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

Matrix diag2(double a, double b) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

/// Grid scan plus golden-section refinement of a periodic function of an angle.
double angle_extremum(const std::function<double(double)>& f, int grid, bool maximize) {
    const double sign = maximize ? -1.0 : 1.0;
    auto g = [&](double t) { return sign * f(t); };
    int best = 0;
    double bv = INFINITY;
    for (int i = 0; i < grid; ++i) {
        const double v = g(M_PI * i / grid);
        if (v < bv) {
            bv = v;
            best = i;
        }
    }
    double lo = M_PI * (best - 1) / grid;
    double hi = M_PI * (best + 1) / grid;
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 80; ++it) {
        const double m1 = hi - r * (hi - lo);
        const double m2 = lo + r * (hi - lo);
        if (g(m1) < g(m2)) hi = m2;
        else lo = m1;
    }
    return sign * std::min(bv, g(0.5 * (lo + hi)));
}

Matrix inv_sqrt(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

/// d_1 and d_2 of id : {x^T A1 x <= 1} -> {x^T A2 x <= 1} by direct search over quotient
/// directions s: d_2 = min_s sup_{x in E1} min_t |x - t s|_{E2}.
std::pair<double, double> brute_kolmogorov(const Matrix& a1, const Matrix& a2) {
    const Matrix r = inv_sqrt(a1);
    auto on_e1 = [&](double t) { return Vector(r * vec({std::cos(t), std::sin(t)})); };
    auto norm2 = [&](const Vector& y) { return std::sqrt(y.dot(a2 * y)); };
    const double d1 = angle_extremum([&](double t) { return norm2(on_e1(t)); }, 720, true);
    auto quotient_sup = [&](double phi) {
        const Vector s = vec({std::cos(phi), std::sin(phi)});
        return angle_extremum(
            [&](double t) {
                const Vector y = on_e1(t);
                const double q = y.dot(a2 * y) - std::pow(y.dot(a2 * s), 2) / s.dot(a2 * s);
                return std::sqrt(std::max(q, 0.0));
            },
            90, true);
    };
    const double d2 = angle_extremum(quotient_sup, 10000, false);
    return {d1, d2};
}

Matrix random_spd(Rng& rng, int n) {
    const Matrix q = random_orthogonal(rng, n);
    Vector d(n);
    for (int i = 0; i < n; ++i) d(i) = std::exp(uniform(rng, -1.5, 1.5));
    return q * d.asDiagonal() * q.transpose();
}

}  // namespace

TEST_CASE("a body covers itself with one translate") {
    for (const Body& b : {Body::box(vec({1, 1})), Body::euclidean_ball(3), Body::standard_ball(0.5, 2)}) {
        const CoverCertificate c = covering_upper(b, b, 1.0);
        REQUIRE(c.size() == 1);
        CHECK(c.centers[0].norm() == 0.0);
        CHECK(c.lower_bound <= 1.0 + 1e-12);
    }
}

TEST_CASE("box towers") {
    const Body box = Body::box(vec({1, 1}));
    const CoverCertificate c21 = covering_upper(scaled(box, 2.0), box, 1.0);
    CHECK(c21.size() == 4);
    CHECK(c21.lower_bound == doctest::Approx(4.0));
    const CoverCertificate c42 = covering_upper(scaled(box, 4.0), scaled(box, 2.0), 1.0);
    CHECK(c42.size() == 4);
    const CoverCertificate c41 = compose_covers(c42, c21);
    CHECK(c41.size() <= c42.size() * c21.size());
    CHECK(c41.size() == 16);
    CHECK(c41.lower_bound == doctest::Approx(16.0));
    CHECK(uncovered_samples(c41, 10'000, 1) == 0);
    const CoverCertificate direct = covering_upper(scaled(box, 4.0), box, 1.0);
    CHECK(direct.size() == 16);
    CHECK_THROWS_AS(compose_covers(c21, c42), InvalidBodyError);
    // A one-center certificate composes to at most the other size.
    const CoverCertificate one = covering_upper(box, box, 1.0);
    CHECK(compose_covers(one, covering_upper(box, scaled(box, 0.5), 1.0)).size() <= 4);
}

TEST_CASE("certificates are sound on mixed pairs") {
    Rng rng = make_rng(31);
    const LinearMap u = random_unimodular(rng, 2);
    Matrix q(2, 2);
    q << 2, 0.4, 0.4, 1;
    struct Case {
        Body a;
        Body b;
        double scale;
    };
    const std::vector<Case> cases = {
        {Body::transformed(u, Body::standard_ball(0.5, 2)), Body::euclidean_ball(2), 0.3},
        {Body::ellipsoid(q), Body::box(vec({0.3, 0.2})), 1.0},
        {Body::cap_body(2, 0.4, 0.5), Body::standard_ball(0.5, 2), 0.25},
        {Body::euclidean_ball(3), Body::transformed(random_unimodular(rng, 3), Body::standard_ball(0.5, 3)), 0.5},
        {Body::pconv_hull({vec({1, 0.2}), vec({-0.3, 1}), vec({1, 1})}, 0.6), Body::ellipsoid(q), 0.4},
    };
    for (const auto& c : cases) {
        const CoverCertificate cert = covering_upper(c.a, c.b, c.scale, 50'000, 3);
        CHECK(uncovered_samples(cert, 10'000, 7) == 0);
        CHECK(static_cast<double>(cert.size()) >= cert.lower_bound);
        for (const auto& x : cert.centers) CHECK(contains(c.a, x));
    }
}

TEST_CASE("covering caps") {
    CHECK_THROWS_AS(covering_upper(Body::box(vec({1, 1, 1})), Body::box(vec({1, 1, 1})), 1e-3), ResourceError);
    CHECK_THROWS_AS(covering_upper(Body::euclidean_ball(5), Body::euclidean_ball(5), 1.0), DimensionError);
    CHECK_THROWS_AS(covering_upper(Body::euclidean_ball(2), Body::euclidean_ball(3), 1.0), DimensionError);
}

TEST_CASE("covering numbers of t B grow at most exponentially") {
    for (int n = 2; n <= 4; ++n) {
        const Body box = Body::box(Vector::Ones(n));
        const CoverCertificate c = covering_upper(box, box, 0.5);
        CHECK(c.size() == (std::size_t{1} << n));
        CHECK(std::log(static_cast<double>(c.size())) / n == doctest::Approx(std::log(2.0)));
    }
    double prev = 0.0;
    for (int n = 2; n <= 3; ++n) {
        const Body ball = Body::euclidean_ball(n);
        const CoverCertificate c = covering_upper(ball, ball, 0.5, 20'000);
        const double rate = std::log(static_cast<double>(c.size())) / n;
        CHECK(rate >= std::log(2.0) - 1e-12);
        CHECK(rate < 4.0);
        prev = rate;
    }
    CHECK(prev > 0.0);
}

TEST_CASE("Kolmogorov numbers of ellipsoid pairs") {
    const Body ball = Body::euclidean_ball(2);
    const Body e = Body::ellipsoid(diag2(1.0, 0.25));
    const SNumberSequence same = kolmogorov_numbers_ellipsoid(e, e);
    REQUIRE(same.values.size() == 3);
    CHECK(same.values[0] == doctest::Approx(1.0));
    CHECK(same.values[1] == doctest::Approx(1.0));
    CHECK(same.values[2] == 0.0);
    const SNumberSequence wide = kolmogorov_numbers_ellipsoid(e, ball);
    CHECK(wide.values[0] == doctest::Approx(2.0));
    CHECK(wide.values[1] == doctest::Approx(1.0));
    const SNumberSequence narrow = kolmogorov_numbers_ellipsoid(ball, e);
    CHECK(narrow.values[0] == doctest::Approx(1.0));
    CHECK(narrow.values[1] == doctest::Approx(0.5));
    CHECK(to_string(wide.kind) == "kolmogorov");
    CHECK_THROWS_AS(kolmogorov_numbers_ellipsoid(ball, Body::box(vec({1, 1}))), UnsupportedError);
    CHECK_THROWS_AS(kolmogorov_numbers_ellipsoid(ball, Body::ellipsoid(diag2(1.0, 1e-13))), InvalidBodyError);
}

TEST_CASE("spectral Kolmogorov numbers match quotient search") {
    Rng rng = make_rng(32);
    for (int k = 0; k < 20; ++k) {
        const Matrix a1 = random_spd(rng, 2);
        const Matrix a2 = random_spd(rng, 2);
        const SNumberSequence d = kolmogorov_numbers_ellipsoid(Body::ellipsoid(a1), Body::ellipsoid(a2));
        const auto [b1, b2] = brute_kolmogorov(a1, a2);
        CHECK(std::abs(d.values[0] - b1) <= 1e-6 * std::max(1.0, b1));
        CHECK(std::abs(d.values[1] - b2) <= 1e-6 * std::max(1.0, b2));
        CHECK(d.values[0] == doctest::Approx(operator_norm(LinearMap::identity(2), Body::ellipsoid(a1),
                                                           Body::ellipsoid(a2))));
        CHECK(d.values[2] == 0.0);
    }
}

TEST_CASE("Kolmogorov numbers are submultiplicative") {
    Rng rng = make_rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 2;
        const Body e1 = Body::ellipsoid(random_spd(rng, n));
        const Body e2 = Body::ellipsoid(random_spd(rng, n));
        const Body e3 = Body::ellipsoid(random_spd(rng, n));
        const LinearMap u(random_orthogonal(rng, n));
        const LinearMap v(random_orthogonal(rng, n));
        const auto du = kolmogorov_numbers_ellipsoid(e1, e2, u).values;
        const auto dv = kolmogorov_numbers_ellipsoid(e2, e3, v).values;
        const auto dvu = kolmogorov_numbers_ellipsoid(e1, e3, v.compose(u)).values;
        for (int k = 1; k <= n; ++k) {
            for (int m = 1; k + m - 1 <= n; ++m) CHECK(dvu[k + m - 2] <= dv[k - 1] * du[m - 1] * (1 + 1e-9));
        }
        const auto d2u = kolmogorov_numbers_ellipsoid(e1, e2, LinearMap(2.0 * u.matrix())).values;
        for (int k = 0; k < n; ++k) CHECK(d2u[k] == doctest::Approx(2 * du[k]));
    }
}

TEST_CASE("entropy numbers") {
    const Body box = Body::box(vec({1, 1}));
    const SNumberSequence e = entropy_numbers(LinearMap::identity(2), box, box, 4);
    CHECK(e.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t k = 1; k < e.values.size(); ++k) {
        CHECK(e.values[k] <= e.values[k - 1]);
        CHECK(e.lower_bounds[k] <= e.values[k]);
    }
    CHECK(to_string(e.kind) == "entropy");

    const Body ball = Body::euclidean_ball(2);
    const SNumberSequence eb = entropy_numbers(LinearMap::scaling(2, 2.0), ball, ball, 3);
    CHECK(eb.values[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(eb.lower_bounds[1] == doctest::Approx(std::sqrt(2.0)));
    CHECK(eb.values[1] >= std::sqrt(2.0));
    CHECK(eb.values[2] <= eb.values[1]);

    const SNumberSequence e2 = entropy_numbers(LinearMap::scaling(2, 4.0), ball, ball, 3);
    for (int k = 0; k < 3; ++k) CHECK(e2.values[k] == doctest::Approx(2 * eb.values[k]).epsilon(1e-6));

    // e_1 of a generated body into an ellipsoid is the operator norm.
    Rng rng = make_rng(34);
    const LinearMap u = random_unimodular(rng, 3);
    const Body lp = Body::transformed(u, Body::standard_ball(0.5, 3));
    Matrix q(3, 3);
    q << 2, 0.3, 0, 0.3, 1, 0.2, 0, 0.2, 0.7;
    const SNumberSequence el = entropy_numbers(LinearMap::identity(3), lp, Body::ellipsoid(q), 3, 20'000);
    double norm = 0.0;
    for (int i = 0; i < 3; ++i) {
        const Vector g = u.matrix().col(i);
        norm = std::max(norm, std::sqrt(g.dot(q * g)));
    }
    CHECK(el.values[0] == doctest::Approx(norm).epsilon(1e-3));
    CHECK(el.values[1] <= el.values[0]);
    CHECK(el.values[2] <= el.values[1]);
    CHECK_THROWS_AS(entropy_numbers(LinearMap::identity(2), box, box, 9), InvalidBodyError);
}

TEST_CASE("Carl ratio") {
    const Body ball = Body::euclidean_ball(2);
    CHECK(carl_ratio(LinearMap::identity(2), ball, ball, 1.0, 1) == doctest::Approx(1.0));
    const double r = carl_ratio(LinearMap::identity(2), ball, ball, 1.0, 2);
    CHECK(r >= 0.99);
    CHECK(std::isfinite(r));
    const Body e1 = Body::ellipsoid(diag2(1.0, 1.0));
    const Body e4 = Body::ellipsoid(diag2(1.0 / 16, 1.0 / 16));
    const double r1 = carl_ratio(LinearMap::identity(2), e1, Body::ellipsoid(diag2(1.0, 0.5)), 1.0, 2);
    const double r4 = carl_ratio(LinearMap::identity(2), e4, Body::ellipsoid(diag2(1.0, 0.5)), 1.0, 2);
    CHECK(r4 == doctest::Approx(r1).epsilon(1e-6));
}

TEST_CASE("Lemma 2 iii") {
    const Body box = Body::box(vec({1, 1}));
    const Body box2 = scaled(box, 2.0);
    const CoverCertificate cert = covering_upper(box2, box, 1.0);
    const Lemma2Check with_ball = lemma2_iii_check(box2, box, Body::euclidean_ball(2), cert, 200'000, 1);
    CHECK(with_ball.holds);
    CHECK(with_ball.cover_size == 4);
    CHECK(with_ball.lhs / with_ball.rhs <= 4.0);
    CHECK(std::abs(with_ball.lhs - (16 + 16 + M_PI)) <= 3 * with_ball.lhs_std_error + 1e-9);
    const Lemma2Check bare = lemma2_iii_check(box2, box, std::nullopt, cert);
    CHECK(bare.lhs == doctest::Approx(16.0));
    CHECK(bare.rhs == doctest::Approx(16.0));
    CHECK(bare.holds);
    const CoverCertificate self = covering_upper(box, box, 1.0);
    const Lemma2Check trivial = lemma2_iii_check(box, box, Body::euclidean_ball(2), self, 50'000, 2);
    CHECK(trivial.holds);
    CHECK_THROWS_AS(lemma2_iii_check(box, box2, std::nullopt, cert), InvalidBodyError);
}

TEST_CASE("certificate size against volume ratio for nested p-balls") {
    struct Nested {
        Body outer;
        Body inner;
    };
    Matrix q(2, 2);
    q << 1.0, 0.3, 0.3, 0.5;
    const std::vector<Nested> cases = {
        {Body::box(vec({2, 2})), Body::box(vec({1, 1}))},
        {Body::euclidean_ball(2, 3.0), Body::euclidean_ball(2)},
        {Body::standard_ball(0.5, 2, 4.0), Body::standard_ball(0.5, 2)},
        {Body::standard_ball(0.5, 3, 2.0), Body::standard_ball(0.5, 3)},
        {Body::euclidean_ball(2, 2.0), Body::ellipsoid(q)},
        {Body::box(vec({3, 3, 3})), Body::euclidean_ball(3)},
    };
    double worst = 0.0;
    for (const auto& c : cases) {
        const CoverCertificate cert = covering_upper(c.outer, c.inner, 1.0, 50'000, 5);
        const double ratio = volume(c.outer).value / volume(c.inner).value;
        const double factor = static_cast<double>(cert.size()) / ratio;
        MESSAGE(c.outer.describe() << " / " << c.inner.describe() << ": size " << cert.size() << " ratio " << ratio);
        CHECK(factor >= 1.0 - 1e-12);
        if (c.outer.dim() == 2) CHECK(factor <= 4.0);
        worst = std::max(worst, factor);
    }
    MESSAGE("max N(B1,B2) / (|B1|/|B2|) = " << worst);
    CHECK(std::isfinite(worst));
}
