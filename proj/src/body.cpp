#include "pcg/body.hpp"

#include "internal/combinatorics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pcg {

namespace {

using internal::binomial;
using internal::for_each_subset;

constexpr std::size_t kPrecomputeCap = 200'000;

void check_dim(int n, const char* who) {
    if (n < 1 || n > kMaxDimension) {
        throw DimensionError(fmt::format("{}: dimension {} outside [1, {}]", who, n, kMaxDimension));
    }
}

void check_p(double p, const char* who) {
    if (!(p > 0.0 && p <= 1.0)) {
        throw InvalidBodyError(fmt::format("{}: p = {} outside (0, 1]", who, p));
    }
}

int matrix_rank(const std::vector<Vector>& vs, int n) {
    Matrix m(n, static_cast<int>(vs.size()));
    for (std::size_t i = 0; i < vs.size(); ++i) m.col(static_cast<int>(i)) = vs[i];
    Eigen::ColPivHouseholderQR<Matrix> qr(m);
    qr.setThreshold(1e-10);
    return static_cast<int>(qr.rank());
}

bool same_vector(const Vector& a, const Vector& b) {
    const double scale = std::max(a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>());
    return (a - b).lpNorm<Eigen::Infinity>() <= 1e-12 * scale;
}

/// Removes duplicates and antipodal copies; keeps first occurrences.
std::vector<Vector> symmetric_representatives(const std::vector<Vector>& vs, int n, const char* who) {
    std::vector<Vector> reps;
    for (const auto& v : vs) {
        if (v.size() != n) throw DimensionError(fmt::format("{}: vector dimension mismatch", who));
        if (!v.allFinite()) throw InvalidBodyError(fmt::format("{}: non-finite vector", who));
        if (v.norm() == 0.0) throw InvalidBodyError(fmt::format("{}: zero vector", who));
        bool seen = false;
        for (const auto& r : reps) {
            if (same_vector(v, r) || same_vector(v, -r)) {
                seen = true;
                break;
            }
        }
        if (!seen) reps.push_back(v);
    }
    return reps;
}

/// Vertices {y : |<a_i,y>| <= 1} of a symmetric H-polytope, one per antipodal pair.
std::vector<Vector> polytope_vertices(const std::vector<Vector>& normals, int n) {
    const int m = static_cast<int>(normals.size());
    if (binomial(m, n) * std::ldexp(1.0, n - 1) > 4e6) {
        throw ResourceError("Body::polytope: too many facets for vertex enumeration");
    }
    std::vector<Vector> vertices;
    Matrix a(n, n);
    Vector rhs(n);
    for_each_subset(m, n, [&](const std::vector<int>& idx) {
        for (int r = 0; r < n; ++r) a.row(r) = normals[idx[r]].transpose();
        Eigen::FullPivLU<Matrix> lu(a);
        if (!lu.isInvertible()) return;
        const double scale = a.rowwise().norm().prod();
        if (std::abs(lu.determinant()) <= 1e-12 * scale) return;
        // Sign patterns modulo global sign.
        for (long mask = 0; mask < (1L << (n - 1)); ++mask) {
            rhs(0) = 1.0;
            for (int r = 1; r < n; ++r) rhs(r) = (mask >> (r - 1)) & 1 ? -1.0 : 1.0;
            Vector y = lu.solve(rhs);
            bool feasible = true;
            for (const auto& nv : normals) {
                if (std::abs(nv.dot(y)) > 1.0 + 1e-10) {
                    feasible = false;
                    break;
                }
            }
            if (!feasible) continue;
            bool seen = false;
            for (const auto& v : vertices) {
                if ((v - y).norm() <= 1e-9 * (1.0 + y.norm()) || (v + y).norm() <= 1e-9 * (1.0 + y.norm())) {
                    seen = true;
                    break;
                }
            }
            if (!seen) vertices.push_back(y);
        }
    });
    return vertices;
}

double max_norm(const std::vector<Vector>& vs) {
    double r = 0.0;
    for (const auto& v : vs) r = std::max(r, v.norm());
    return r;
}

}  // namespace

namespace detail {

SubsetSolver::SubsetSolver(const std::vector<Vector>& reps, int n) : n_(n), reps_(reps) {
    const int m = static_cast<int>(reps.size());
    precomputed_ = binomial(m, n) <= static_cast<double>(kPrecomputeCap);
    if (!precomputed_) return;
    Matrix g(n, n);
    for_each_subset(m, n, [&](const std::vector<int>& idx) {
        for (int c = 0; c < n; ++c) g.col(c) = reps[idx[c]];
        Eigen::FullPivLU<Matrix> lu(g);
        double scale = 1.0;
        for (int c = 0; c < n; ++c) scale *= g.col(c).norm();
        if (!lu.isInvertible() || std::abs(lu.determinant()) <= 1e-12 * scale) return;
        Matrix inv = lu.inverse();
        indices_.insert(indices_.end(), idx.begin(), idx.end());
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) inverse_.push_back(inv(r, c));
        }
        ++count_;
    });
    if (count_ == 0) throw InvalidBodyError("generators do not span the ambient space");
}

SubsetSolver::Result SubsetSolver::solve(const Vector& x, double p, bool want_coefficients) const {
    Result out;
    out.cost_p = std::numeric_limits<double>::infinity();
    out.cost_1 = std::numeric_limits<double>::infinity();
    const int n = n_;
    double lambda[kMaxDimension];
    const bool half = (p == 0.5);
    const bool one = (p == 1.0);

    auto consider = [&](const int* idx) {
        double c1 = 0.0;
        double cp = 0.0;
        for (int r = 0; r < n; ++r) {
            const double a = std::abs(lambda[r]);
            c1 += a;
            cp += one ? a : (half ? std::sqrt(a) : std::pow(a, p));
        }
        if (c1 < out.cost_1) out.cost_1 = c1;
        if (cp < out.cost_p) {
            out.cost_p = cp;
            if (want_coefficients) {
                out.support.assign(idx, idx + n);
                out.coefficients = Vector::Map(lambda, n);
            }
        }
    };

    if (precomputed_) {
        const double* inv = inverse_.data();
        for (std::size_t s = 0; s < count_; ++s, inv += n * n) {
            for (int r = 0; r < n; ++r) {
                double acc = 0.0;
                for (int c = 0; c < n; ++c) acc += inv[r * n + c] * x(c);
                lambda[r] = acc;
            }
            consider(&indices_[s * n]);
        }
    } else {
        Matrix g(n, n);
        for_each_subset(static_cast<int>(reps_.size()), n, [&](const std::vector<int>& idx) {
            for (int c = 0; c < n; ++c) g.col(c) = reps_[idx[c]];
            Eigen::FullPivLU<Matrix> lu(g);
            double scale = 1.0;
            for (int c = 0; c < n; ++c) scale *= g.col(c).norm();
            if (!lu.isInvertible() || std::abs(lu.determinant()) <= 1e-12 * scale) return;
            Vector l = lu.solve(x);
            for (int r = 0; r < n; ++r) lambda[r] = l(r);
            consider(idx.data());
        });
    }
    if (!one) {
        out.cost_p = half ? out.cost_p * out.cost_p : std::pow(out.cost_p, 1.0 / p);
    }
    return out;
}

}  // namespace detail

namespace {

std::shared_ptr<detail::BodyData> make_data(Shape shape, int n) {
    auto d = std::make_shared<detail::BodyData>();
    d->shape = std::move(shape);
    d->dim = n;
    return d;
}

}  // namespace

Body Body::standard_ball(double p, int n, double radius) {
    check_dim(n, "Body::standard_ball");
    check_p(p, "Body::standard_ball");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidBodyError("Body::standard_ball: radius must be positive");
    auto d = make_data(shape::StandardBall{p, n, radius}, n);
    d->p = p;
    d->convex = (p == 1.0);
    d->outer_radius = radius;
    GeneratorForm g;
    g.p = p;
    for (int i = 0; i < n; ++i) g.reps.push_back(radius * Vector::Unit(n, i));
    d->generators = std::move(g);
    return Body(d);
}

Body Body::euclidean_ball(int n, double radius) {
    check_dim(n, "Body::euclidean_ball");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidBodyError("Body::euclidean_ball: radius must be positive");
    auto d = make_data(shape::EuclideanBall{n, radius}, n);
    d->outer_radius = radius;
    return Body(d);
}

Body Body::ellipsoid(Matrix a) {
    const int n = static_cast<int>(a.rows());
    if (a.cols() != a.rows()) throw InvalidBodyError("Body::ellipsoid: shape matrix must be square");
    check_dim(n, "Body::ellipsoid");
    if (!a.allFinite()) throw InvalidBodyError("Body::ellipsoid: non-finite shape matrix");
    const double scale = a.cwiseAbs().maxCoeff();
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > kTolerance.shape_symmetry * std::max(scale, 1.0)) {
        throw InvalidBodyError("Body::ellipsoid: shape matrix is not symmetric");
    }
    a = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
    const double lmin = eig.eigenvalues().minCoeff();
    if (!(lmin > 0.0)) throw InvalidBodyError("Body::ellipsoid: shape matrix is not positive definite");
    auto d = make_data(shape::Ellipsoid{a}, n);
    d->outer_radius = 1.0 / std::sqrt(lmin);
    d->ellipsoid_inverse = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
                           eig.eigenvectors().transpose();
    return Body(d);
}

Body Body::box(Vector w) {
    const int n = static_cast<int>(w.size());
    check_dim(n, "Body::box");
    if (!w.allFinite() || (w.array() <= 0.0).any()) throw InvalidBodyError("Body::box: half widths must be positive");
    auto d = make_data(shape::Box{w}, n);
    d->outer_radius = w.norm();
    GeneratorForm g;
    for (long mask = 0; mask < (1L << (n - 1)); ++mask) {
        Vector c = w;
        for (int i = 1; i < n; ++i) {
            if ((mask >> (i - 1)) & 1) c(i) = -c(i);
        }
        g.reps.push_back(c);
    }
    d->generators = std::move(g);
    return Body(d);
}

Body Body::pconv_hull(const std::vector<Vector>& generators, double p) {
    if (generators.empty()) throw InvalidBodyError("Body::pconv_hull: empty generator list");
    const int n = static_cast<int>(generators.front().size());
    check_dim(n, "Body::pconv_hull");
    check_p(p, "Body::pconv_hull");
    auto reps = symmetric_representatives(generators, n, "Body::pconv_hull");
    if (2 * reps.size() > static_cast<std::size_t>(kMaxGenerators)) {
        throw ResourceError(fmt::format("Body::pconv_hull: {} generators exceed the cap of {}", 2 * reps.size(),
                                        kMaxGenerators));
    }
    if (matrix_rank(reps, n) < n) throw InvalidBodyError("Body::pconv_hull: generators do not span the ambient space");
    shape::PConvHull s;
    s.p = p;
    for (const auto& r : reps) {
        s.generators.push_back(r);
        s.generators.push_back(-r);
    }
    auto d = make_data(std::move(s), n);
    d->p = p;
    d->convex = (p == 1.0);
    d->outer_radius = max_norm(reps);
    d->solver = std::make_shared<detail::SubsetSolver>(reps, n);
    d->generators = GeneratorForm{reps, p};
    return Body(d);
}

Body Body::polytope(const std::vector<Vector>& normals) {
    if (normals.empty()) throw InvalidBodyError("Body::polytope: empty normal list");
    const int n = static_cast<int>(normals.front().size());
    check_dim(n, "Body::polytope");
    auto reps = symmetric_representatives(normals, n, "Body::polytope");
    if (matrix_rank(reps, n) < n) throw InvalidBodyError("Body::polytope: normals do not span, body is unbounded");
    auto vertices = polytope_vertices(reps, n);
    auto d = make_data(shape::Polytope{reps}, n);
    d->outer_radius = max_norm(vertices);
    d->dual_solver = std::make_shared<detail::SubsetSolver>(reps, n);
    d->solver = std::make_shared<detail::SubsetSolver>(vertices, n);
    d->generators = GeneratorForm{std::move(vertices), 1.0};
    return Body(d);
}

Body Body::cap_body(int n, double eps, double p) {
    check_dim(n, "Body::cap_body");
    if (n < 2) throw DimensionError("Body::cap_body: dimension must be at least 2");
    check_p(p, "Body::cap_body");
    if (!(eps > 0.0 && eps < M_PI / 2)) throw InvalidBodyError("Body::cap_body: eps outside (0, pi/2)");
    auto d = make_data(shape::CapBody{n, eps, p}, n);
    d->p = p;
    d->convex = (p == 1.0);
    d->outer_radius = 1.0;
    return Body(d);
}

Body Body::cap_polar(int n, double eps) {
    check_dim(n, "Body::cap_polar");
    if (n < 2) throw DimensionError("Body::cap_polar: dimension must be at least 2");
    if (!(eps > 0.0 && eps < M_PI / 2)) throw InvalidBodyError("Body::cap_polar: eps outside (0, pi/2)");
    auto d = make_data(shape::CapPolar{n, eps}, n);
    d->outer_radius = 1.0 / std::cos(eps);
    return Body(d);
}

Body Body::transformed(const LinearMap& map, const Body& inner) {
    if (map.dim() != inner.dim()) throw DimensionError("Body::transformed: dimension mismatch");
    auto d = make_data(shape::Transformed{map, std::make_shared<const Body>(inner)}, inner.dim());
    d->p = inner.p();
    d->convex = inner.is_convex();
    Eigen::JacobiSVD<Matrix> svd(map.matrix());
    d->outer_radius = svd.singularValues()(0) * inner.outer_radius();
    if (const auto* g = inner.generator_form()) {
        GeneratorForm mapped;
        mapped.p = g->p;
        for (const auto& r : g->reps) mapped.reps.push_back(map.apply(r));
        d->generators = std::move(mapped);
    }
    return Body(d);
}

int Body::dim() const { return data_->dim; }
const Shape& Body::shape() const { return data_->shape; }
const GeneratorForm* Body::generator_form() const { return data_->generators ? &*data_->generators : nullptr; }
bool Body::is_convex() const { return data_->convex; }
double Body::p() const { return data_->p; }
double Body::outer_radius() const { return data_->outer_radius; }

std::string Body::describe() const {
    struct Visitor {
        std::string operator()(const shape::StandardBall& s) const {
            return fmt::format("StandardBall(p={:.6g},n={},r={:.6g})", s.p, s.n, s.radius);
        }
        std::string operator()(const shape::EuclideanBall& s) const {
            return fmt::format("EuclideanBall(n={},r={:.6g})", s.n, s.radius);
        }
        std::string operator()(const shape::Ellipsoid& s) const {
            return fmt::format("Ellipsoid(n={},det={:.6g})", s.shape.rows(), s.shape.determinant());
        }
        std::string operator()(const shape::Box& s) const {
            std::string w;
            for (int i = 0; i < s.half_widths.size(); ++i) w += fmt::format("{}{:.6g}", i ? ";" : "", s.half_widths(i));
            return fmt::format("Box({})", w);
        }
        std::string operator()(const shape::PConvHull& s) const {
            return fmt::format("PConvHull(m={},p={:.6g})", s.generators.size(), s.p);
        }
        std::string operator()(const shape::Polytope& s) const {
            return fmt::format("Polytope(facets={})", 2 * s.normals.size());
        }
        std::string operator()(const shape::CapBody& s) const {
            return fmt::format("CapBody(n={},eps={:.6g},p={:.6g})", s.n, s.eps, s.p);
        }
        std::string operator()(const shape::CapPolar& s) const {
            return fmt::format("CapPolar(n={},eps={:.6g})", s.n, s.eps);
        }
        std::string operator()(const shape::Transformed& s) const {
            return fmt::format("Transformed(det={:.6g},{})", s.map.det(), s.inner->describe());
        }
    };
    return std::visit(Visitor{}, data_->shape);
}

}  // namespace pcg
