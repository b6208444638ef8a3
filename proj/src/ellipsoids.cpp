#include "pcg/ellipsoids.hpp"

#include "pcg/bodies.hpp"
#include "pcg/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pcg {

namespace {

constexpr int kBoundaryDirections = 2000;
constexpr int kMaxIterations = 100'000;
constexpr double kWeightTolerance = 1e-10;
constexpr int kRefineRounds = 6;
constexpr int kRefineSeeds = 24;

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

Matrix spd_power(const Matrix& a, double power) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a));
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
        throw InvalidBodyError("ellipsoid shape matrix is not positive definite");
    }
    const Vector d = es.eigenvalues().array().pow(power);
    return symmetrize(es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose());
}

void check_spanning(const std::vector<Vector>& points, int n) {
    if (points.empty()) throw InvalidBodyError("enclosing ellipsoid: empty point set");
    Matrix m(n, static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = points[i];
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() < n || s(n - 1) <= 1e-12 * std::max(1.0, s(0))) {
        throw InvalidBodyError("enclosing ellipsoid: body is degenerate (points do not span R^n)");
    }
}

Vector boundary_point(const Body& b, const Vector& d) {
    const double g = gauge_value(b, d);
    if (!(g > 0.0) || !std::isfinite(g)) throw InvalidBodyError("enclosing ellipsoid: body has no interior");
    return d / g;
}

double quadratic(const Matrix& a, const Vector& x) { return x.dot(a * x); }

/// Pattern search over directions for a local maximum of x^T A x on the boundary of b.
Vector refine_contact(const Body& b, const Matrix& a, Vector d) {
    const int n = b.dim();
    d.normalize();
    Vector best = boundary_point(b, d);
    double best_f = quadratic(a, best);
    double step = 0.05;
    while (step > 1e-9) {
        bool improved = false;
        for (int i = 0; i < n && !improved; ++i) {
            for (double s : {step, -step}) {
                Vector e = d;
                e(i) += s;
                e.normalize();
                const Vector x = boundary_point(b, e);
                const double f = quadratic(a, x);
                if (f > best_f) {
                    best_f = f;
                    best = x;
                    d = e;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return best;
}

Matrix sampled_enclosing(const Body& b) {
    const int n = b.dim();
    const auto dirs = sphere_points(n, kBoundaryDirections);
    std::vector<Vector> points(dirs.size());
    parallel_for(dirs.size(), [&](std::size_t i) { points[i] = boundary_point(b, dirs[i]); });
    // Symmetric bodies: one of each antipodal pair suffices.
    std::vector<Vector> half;
    half.reserve(points.size());
    for (const auto& x : points) {
        const double lead = x(n - 1) != 0.0 ? x(n - 1) : x(0);
        if (lead >= 0.0) half.push_back(x);
    }
    Vector weights;
    Matrix a = mvee_shape(half, weights);
    for (int round = 0; round < kRefineRounds; ++round) {
        std::vector<std::size_t> order(half.size());
        std::iota(order.begin(), order.end(), 0);
        const std::size_t k = std::min<std::size_t>(kRefineSeeds, order.size());
        std::partial_sort(order.begin(), order.begin() + static_cast<long>(k), order.end(),
                          [&](std::size_t i, std::size_t j) { return quadratic(a, half[i]) > quadratic(a, half[j]); });
        std::vector<Vector> refined(k);
        parallel_for(k, [&](std::size_t i) { refined[i] = refine_contact(b, a, half[order[i]]); });
        double worst = 0.0;
        for (const auto& x : refined) worst = std::max(worst, quadratic(a, x));
        for (auto& x : refined) half.push_back(std::move(x));
        if (worst <= 1.0 + 1e-6) break;
        a = mvee_shape(half, weights);
    }
    double worst = 0.0;
    for (const auto& x : half) worst = std::max(worst, quadratic(a, x));
    return a / worst;
}

Matrix enclosing_shape(const Body& b) {
    if (auto a = ellipsoid_shape(b)) return *a;
    if (const auto* t = b.as<shape::Transformed>()) {
        const Matrix inner = enclosing_shape(*t->inner);
        const Matrix& mi = t->map.inverse_matrix();
        return symmetrize(mi.transpose() * inner * mi);
    }
    if (const auto* g = b.generator_form()) {
        check_spanning(g->reps, b.dim());
        return mvee_shape(g->reps);
    }
    return sampled_enclosing(b);
}

double rel_var(const VolumeEstimate& v) {
    if (v.value <= 0.0) throw InvalidBodyError("milman functional: zero volume");
    const double r = v.std_error / v.value;
    return r * r;
}

}  // namespace

Matrix mvee_shape(const std::vector<Vector>& points) {
    Vector weights;
    return mvee_shape(points, weights);
}

Matrix mvee_shape(const std::vector<Vector>& points, Vector& weights) {
    if (points.empty()) throw InvalidBodyError("enclosing ellipsoid: empty point set");
    const int n = static_cast<int>(points.front().size());
    check_spanning(points, n);
    const auto m = static_cast<Eigen::Index>(points.size());
    Matrix x(n, m);
    for (Eigen::Index i = 0; i < m; ++i) x.col(i) = points[static_cast<std::size_t>(i)];
    Vector u = Vector::Constant(m, 1.0 / static_cast<double>(m));
    if (weights.size() > 0 && weights.size() <= m) {
        u.setZero();
        u.head(weights.size()) = weights;
        const Eigen::Index added = m - weights.size();
        if (added > 0) {
            u *= 0.9;
            u.tail(added).setConstant(0.1 / static_cast<double>(added));
        }
    }
    auto moment = [&]() { return symmetrize(x * u.asDiagonal() * x.transpose()); };
    Matrix s = moment();
    for (int it = 0; it < kMaxIterations; ++it) {
        if (it % 64 == 63) s = moment();
        const Matrix y = s.ldlt().solve(x);
        const Vector g = x.cwiseProduct(y).colwise().sum().transpose();
        Eigen::Index up = 0;
        Eigen::Index down = -1;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (g(i) > g(up)) up = i;
            if (u(i) > 0.0 && (down < 0 || g(i) < g(down))) down = i;
        }
        const double plus = g(up) - n;
        const double minus = n - g(down);
        // Both the toward and the away step sizes fall below the weight tolerance.
        if (plus / (n * (g(up) - 1.0)) < kWeightTolerance && minus <= kWeightTolerance * n) break;
        if (plus >= minus) {
            const double step = plus / (n * (g(up) - 1.0));
            u *= 1.0 - step;
            u(up) += step;
            s = (1.0 - step) * s + step * x.col(up) * x.col(up).transpose();
        } else {
            double tau = u(down) / (1.0 - u(down));
            if (g(down) > 1.0) tau = std::min(tau, minus / (n * (g(down) - 1.0)));
            u *= 1.0 + tau;
            u(down) -= tau;
            if (u(down) < 1e-300) u(down) = 0.0;
            s = (1.0 + tau) * s - tau * x.col(down) * x.col(down).transpose();
        }
        s = symmetrize(s);
    }
    weights = u;
    Matrix a = symmetrize(Matrix(moment().inverse()) / static_cast<double>(n));
    const double worst = x.cwiseProduct(a * x).colwise().sum().maxCoeff();
    return a / worst;
}

Body enclosing_ellipsoid(const Body& b) { return Body::ellipsoid(enclosing_shape(b)); }

Body inscribed_ellipsoid(const Body& b) {
    if (auto a = ellipsoid_shape(b)) return Body::ellipsoid(*a);
    return polar(enclosing_ellipsoid(polar(b)));
}

VolumeEstimate milman_functional(const Body& b, const Body& d, long budget, std::uint64_t seed) {
    if (b.dim() != d.dim()) throw DimensionError("milman functional: dimension mismatch");
    const int n = b.dim();
    const Body bp = polar(b);
    const Body dp = polar(d);
    const VolumeEstimate sum = volume_sum(b, d, budget, derive_seed(seed, 1));
    const VolumeEstimate cap = volume_intersection(b, d, budget, derive_seed(seed, 2));
    const VolumeEstimate psum = volume_sum(bp, dp, budget, derive_seed(seed, 3));
    const VolumeEstimate pcap = volume_intersection(bp, dp, budget, derive_seed(seed, 4));
    const double value = std::pow(sum.value / cap.value * psum.value / pcap.value, 1.0 / n);
    VolumeEstimate out;
    out.value = value;
    out.std_error = value / n * std::sqrt(rel_var(sum) + rel_var(cap) + rel_var(psum) + rel_var(pcap));
    const bool exact = sum.method == VolumeMethod::exact && cap.method == VolumeMethod::exact &&
                       psum.method == VolumeMethod::exact && pcap.method == VolumeMethod::exact;
    out.method = exact ? VolumeMethod::exact : VolumeMethod::monte_carlo;
    out.samples = sum.samples + cap.samples + psum.samples + pcap.samples;
    out.indeterminate = sum.indeterminate + cap.indeterminate + psum.indeterminate + pcap.indeterminate;
    out.flagged = sum.flagged || cap.flagged || psum.flagged || pcap.flagged;
    return out;
}

PositionedPair position_pair(const Body& b1, const Body& b2, long budget, std::uint64_t seed) {
    if (b1.dim() != b2.dim()) throw DimensionError("position_pair: dimension mismatch");
    const int n = b1.dim();
    const double omega = unit_ball_volume(n);
    struct Side {
        LinearMap u;
        Body d;
        double rho;
        double alpha;
        double alpha_err;
    };
    auto side = [&](const Body& b, std::uint64_t stream) {
        const Matrix a = enclosing_shape(b);
        // T = A^{-1/2}, so T^{-1} = A^{1/2} and |det T|^{1/n} = det(A)^{-1/(2n)}.
        const double rho = std::pow(a.determinant(), -0.5 / n);
        const VolumeEstimate v = volume(b, budget, derive_seed(seed, stream));
        if (v.value <= 0.0) throw InvalidBodyError("position_pair: body has zero volume");
        const double alpha = std::pow(v.value / omega, 1.0 / n);
        return Side{LinearMap(rho * spd_power(a, 0.5)), Body::ellipsoid(a), rho, alpha,
                    alpha / n * v.std_error / v.value};
    };
    const Side s1 = side(b1, 1);
    const Side s2 = side(b2, 2);
    PositionedPair out{s1.u, s2.u, s1.alpha, s2.alpha, s1.alpha_err, s2.alpha_err, s1.d, s2.d, s1.rho, s2.rho,
                       "mvee: D_i = minimum-volume ellipsoid enclosing conv(B_i) = T_i(Ball), T_i SPD; "
                       "u_i = |det T_i|^{1/n} T_i^{-1}"};
    return out;
}

LinearMap positioning_map(const PositionedPair& pair) { return pair.u2.inverse().compose(pair.u1).unimodular(); }

}  // namespace pcg
