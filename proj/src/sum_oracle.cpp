#include "pcg/sum_oracle.hpp"

#include "internal/combinatorics.hpp"
#include "pcg/bodies.hpp"
#include "pcg/lp.hpp"
#include "pcg/measure.hpp"
#include "pcg/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pcg {

namespace {

constexpr double kTol = kTolerance.sum_membership;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEdgeSubsetCap = 20'000;
constexpr double kPatchCap = 20'000;

struct Strategy {
    virtual ~Strategy() = default;
    virtual Membership decide(const Vector& x) const = 0;
};

struct Generated {
    Matrix reps;  // n x m
    double p = 1.0;
};

std::optional<Generated> generated(const Body& b) {
    const GeneratorForm* g = b.generator_form();
    if (!g) return std::nullopt;
    Generated out;
    out.p = g->p;
    out.reps.resize(b.dim(), static_cast<int>(g->reps.size()));
    for (std::size_t i = 0; i < g->reps.size(); ++i) out.reps.col(static_cast<int>(i)) = g->reps[i];
    return out;
}

enum class SetKind { box, l1, l2 };

/// A = {G lambda : lambda in C} for a convex set C with cheap projection.
struct ConvexParam {
    Matrix g;
    SetKind set;
    Vector widths;  // box only
};

Matrix spd_inverse_root(const Matrix& q) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(q);
    return eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
           eig.eigenvectors().transpose();
}

std::optional<ConvexParam> convex_param(const Body& b) {
    const int n = b.dim();
    if (const auto* x = b.as<shape::Box>()) return ConvexParam{Matrix::Identity(n, n), SetKind::box, x->half_widths};
    if (const auto* t = b.as<shape::Transformed>()) {
        if (const auto* x = t->inner->as<shape::Box>()) return ConvexParam{t->map.matrix(), SetKind::box, x->half_widths};
    }
    if (auto q = ellipsoid_shape(b)) return ConvexParam{spd_inverse_root(*q), SetKind::l2, {}};
    if (auto g = generated(b); g && g->p == 1.0) return ConvexParam{g->reps, SetKind::l1, {}};
    return std::nullopt;
}

// ---------------------------------------------------------------------------

/// Two polytopes: min t with G l + H m = x, |l|_1 <= t, |m|_1 <= t.
class LpSum final : public Strategy {
public:
    LpSum(const Matrix& g, const Matrix& h) : n_(static_cast<int>(g.rows())) {
        const int ma = static_cast<int>(g.cols());
        const int mb = static_cast<int>(h.cols());
        const int cols = 2 * ma + 2 * mb + 3;
        a_ = Matrix::Zero(n_ + 2, cols);
        a_.block(0, 0, n_, ma) = g;
        a_.block(0, ma, n_, ma) = -g;
        a_.block(0, 2 * ma, n_, mb) = h;
        a_.block(0, 2 * ma + mb, n_, mb) = -h;
        const int t = 2 * ma + 2 * mb;
        a_.row(n_).segment(0, 2 * ma).setOnes();
        a_(n_, t) = -1.0;
        a_(n_, t + 1) = 1.0;
        a_.row(n_ + 1).segment(2 * ma, 2 * mb).setOnes();
        a_(n_ + 1, t) = -1.0;
        a_(n_ + 1, t + 2) = 1.0;
        c_ = Vector::Zero(cols);
        c_(t) = 1.0;
    }

    Membership decide(const Vector& x) const override {
        Vector b = Vector::Zero(n_ + 2);
        b.head(n_) = x;
        const LpResult r = solve_standard_lp(a_, b, c_);
        if (r.status != LpStatus::optimal) return Membership::indeterminate;
        return r.value <= 1.0 + kTol ? Membership::inside : Membership::outside;
    }

private:
    int n_;
    Matrix a_;
    Vector c_;
};

// ---------------------------------------------------------------------------

/// Two generated bodies with arbitrary p. Some optimal decomposition is supported on
/// n+1 generators, where the solution set is a line lambda0 + t d; along it the two
/// p-costs are piecewise concave, so the min of their max is attained at a breakpoint
/// (a vanishing coefficient) or at a crossing of the two costs.
class EdgeSum final : public Strategy {
public:
    EdgeSum(const Generated& a, const Generated& b)
        : n_(static_cast<int>(a.reps.rows())), ma_(static_cast<int>(a.reps.cols())), pa_(a.p), pb_(b.p) {
        Matrix all(n_, a.reps.cols() + b.reps.cols());
        all << a.reps, b.reps;
        const int m = static_cast<int>(all.cols());
        const int k = n_ + 1;
        scale_a_ = std::pow(1.0 + kTol, pa_);
        scale_b_ = std::pow(1.0 + kTol, pb_);
        Matrix sub(n_, k);
        internal::for_each_subset(m, k, [&](const std::vector<int>& idx) {
            bool has_b = false;
            for (int i : idx) has_b |= (i >= ma_);
            if (!has_b) return;
            for (int c = 0; c < k; ++c) sub.col(c) = all.col(idx[c]);
            Eigen::JacobiSVD<Matrix> svd(sub, Eigen::ComputeFullU | Eigen::ComputeFullV);
            const Vector& s = svd.singularValues();
            if (s(n_ - 1) <= 1e-11 * s(0)) return;
            Matrix pinv = svd.matrixV().leftCols(n_) * s.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
            Vector d = svd.matrixV().col(n_);
            idx_.insert(idx_.end(), idx.begin(), idx.end());
            for (int r = 0; r < k; ++r) {
                for (int c = 0; c < n_; ++c) pinv_.push_back(pinv(r, c));
                d_.push_back(d(r));
            }
            ++count_;
        });
        // Subsets drawn only from A can only decide x in A, which the radial prefilter covers.
    }

    Membership decide(const Vector& x) const override {
        const int k = n_ + 1;
        double lam0[kMaxDimension + 1];
        double dir[kMaxDimension + 1];
        double bps[kMaxDimension + 1];
        double vals_a[kMaxDimension + 1];
        double vals_b[kMaxDimension + 1];

        auto costs = [&](const int* idx, double t, double& fa, double& fb) {
            fa = 0.0;
            fb = 0.0;
            for (int r = 0; r < k; ++r) {
                const double l = std::abs(lam0[r] + t * dir[r]);
                if (idx[r] < ma_) {
                    fa += pa_ == 1.0 ? l : std::pow(l, pa_);
                } else {
                    fb += pb_ == 1.0 ? l : std::pow(l, pb_);
                }
            }
            fa /= scale_a_;
            fb /= scale_b_;
        };

        auto load = [&](std::size_t e) -> int {
            const double* p = &pinv_[e * k * n_];
            for (int r = 0; r < k; ++r) {
                double acc = 0.0;
                for (int c = 0; c < n_; ++c) acc += p[r * n_ + c] * x(c);
                lam0[r] = acc;
                dir[r] = d_[e * k + r];
            }
            int nb = 0;
            for (int r = 0; r < k; ++r) {
                if (std::abs(dir[r]) > 1e-14) bps[nb++] = -lam0[r] / dir[r];
            }
            std::sort(bps, bps + nb);
            return nb;
        };

        // Breakpoints first: they are basic solutions and cheap.
        for (std::size_t e = 0; e < count_; ++e) {
            const int* idx = &idx_[e * k];
            const int nb = load(e);
            for (int i = 0; i < nb; ++i) {
                double fa, fb;
                costs(idx, bps[i], fa, fb);
                if (fa <= 1.0 && fb <= 1.0) return Membership::inside;
            }
        }
        // Crossings of the two concave costs inside each bounded interval.
        for (std::size_t e = 0; e < count_; ++e) {
            const int* idx = &idx_[e * k];
            const int nb = load(e);
            for (int i = 0; i < nb; ++i) costs(idx, bps[i], vals_a[i], vals_b[i]);
            for (int i = 0; i + 1 < nb; ++i) {
                const double lo = bps[i];
                const double hi = bps[i + 1];
                if (hi - lo <= 1e-15 * (1.0 + std::abs(lo))) continue;
                const double lower = std::max(std::min(vals_a[i], vals_a[i + 1]), std::min(vals_b[i], vals_b[i + 1]));
                if (lower > 1.0) continue;
                constexpr int kSamples = 8;
                double prev_t = lo;
                double prev_h = vals_a[i] - vals_b[i];
                for (int s = 1; s <= kSamples; ++s) {
                    const double t = lo + (hi - lo) * s / kSamples;
                    double fa, fb;
                    costs(idx, t, fa, fb);
                    if (fa <= 1.0 && fb <= 1.0) return Membership::inside;
                    const double h = fa - fb;
                    if ((prev_h < 0.0) != (h < 0.0)) {
                        double a = prev_t;
                        double b = t;
                        double ha = prev_h;
                        for (int it = 0; it < 60; ++it) {
                            const double mid = 0.5 * (a + b);
                            double ma, mb;
                            costs(idx, mid, ma, mb);
                            const double hm = ma - mb;
                            if ((ha < 0.0) == (hm < 0.0)) {
                                a = mid;
                                ha = hm;
                            } else {
                                b = mid;
                            }
                        }
                        double ca, cb;
                        costs(idx, 0.5 * (a + b), ca, cb);
                        if (ca <= 1.0 && cb <= 1.0) return Membership::inside;
                    }
                    prev_t = t;
                    prev_h = h;
                }
            }
        }
        return Membership::outside;
    }

    std::size_t edge_count() const { return count_; }

private:
    int n_;
    int ma_;
    double pa_;
    double pb_;
    double scale_a_ = 1.0;
    double scale_b_ = 1.0;
    std::size_t count_ = 0;
    std::vector<int> idx_;
    std::vector<double> pinv_;
    std::vector<double> d_;
};

// ---------------------------------------------------------------------------

/// Convex parametrized A plus ellipsoid B = {z : |U z| <= 1}: minimize
/// 1/2 |U (x - G lambda)|^2 over lambda in C by accelerated projected gradient, with the
/// Frank-Wolfe gap as a certified lower bound.
class GradientSum final : public Strategy {
public:
    GradientSum(const ConvexParam& a, const Matrix& q) : param_(a) {
        Eigen::LLT<Matrix> llt(q);
        u_ = llt.matrixU();
        m_ = u_ * a.g;
        const double l = Eigen::JacobiSVD<Matrix>(m_).singularValues()(0);
        step_ = 1.0 / (l * l);
    }

    Membership decide(const Vector& x) const override {
        const Vector y = u_ * x;
        const int m = static_cast<int>(m_.cols());
        const double threshold = 0.5 * (1.0 + kTol) * (1.0 + kTol);
        Vector lambda = Vector::Zero(m);
        Vector z = lambda;
        double t = 1.0;
        double f_prev = kInf;
        for (int it = 0; it < 5000; ++it) {
            const Vector r = y - m_ * lambda;
            const double f = 0.5 * r.squaredNorm();
            if (f <= threshold) return Membership::inside;
            const Vector grad = -m_.transpose() * r;
            const double gap = grad.dot(lambda) + set_support(grad);
            if (f - gap > threshold) return Membership::outside;
            if (f > f_prev) {
                z = lambda;
                t = 1.0;
            }
            f_prev = f;
            const Vector gz = -m_.transpose() * (y - m_ * z);
            Vector next = project(z - step_ * gz);
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            z = next + ((t - 1.0) / t_next) * (next - lambda);
            lambda = std::move(next);
            t = t_next;
        }
        return Membership::indeterminate;
    }

private:
    double set_support(const Vector& v) const {
        switch (param_.set) {
            case SetKind::box: return param_.widths.dot(v.cwiseAbs());
            case SetKind::l1: return v.lpNorm<Eigen::Infinity>();
            case SetKind::l2: return v.norm();
        }
        return 0.0;
    }

    Vector project(Vector v) const {
        switch (param_.set) {
            case SetKind::box: return v.cwiseMax(-param_.widths).cwiseMin(param_.widths);
            case SetKind::l2: {
                const double r = v.norm();
                return r > 1.0 ? Vector(v / r) : v;
            }
            case SetKind::l1: {
                if (v.lpNorm<1>() <= 1.0) return v;
                // Sort-based projection onto the l1 ball.
                std::vector<double> a(v.size());
                for (int i = 0; i < v.size(); ++i) a[i] = std::abs(v(i));
                std::sort(a.begin(), a.end(), std::greater<>());
                double cum = 0.0;
                double theta = 0.0;
                for (std::size_t j = 0; j < a.size(); ++j) {
                    cum += a[j];
                    const double th = (cum - 1.0) / static_cast<double>(j + 1);
                    if (a[j] > th) theta = th;
                }
                for (int i = 0; i < v.size(); ++i) {
                    const double s = std::abs(v(i)) - theta;
                    v(i) = s > 0.0 ? std::copysign(s, v(i)) : 0.0;
                }
                return v;
            }
        }
        return v;
    }

    ConvexParam param_;
    Matrix u_;
    Matrix m_;
    double step_ = 1.0;
};

// ---------------------------------------------------------------------------

/// Points of the standard simplex on a lattice of the given resolution.
std::vector<Vector> simplex_lattice(int n, int resolution, bool interior_only) {
    std::vector<Vector> out;
    std::vector<int> c(n, 0);
    std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == n - 1) {
            c[i] = left;
            Vector u(n);
            bool ok = true;
            for (int j = 0; j < n; ++j) {
                u(j) = static_cast<double>(c[j]) / resolution;
                if (interior_only && c[j] == 0) ok = false;
            }
            if (ok) out.push_back(u);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            c[i] = v;
            rec(i + 1, left - v);
        }
    };
    rec(0, resolution);
    return out;
}

/// Generated A plus arbitrary B: the boundary of A is covered by patches
/// G_S diag(s) {u^{1/p} : u in the simplex}; minimize gauge_B(x - a) over them.
class PatchSum final : public Strategy {
public:
    PatchSum(const Body& a, const Generated& g, const Body& b) : b_(b), n_(a.dim()), p_(g.p) {
        const int m = static_cast<int>(g.reps.cols());
        const auto probes = simplex_lattice(n_, n_ + 3, true);
        const int res = n_ <= 2 ? 16 : (n_ == 3 ? 8 : 6);
        grid_ = simplex_lattice(n_, res, false);
        Matrix sub(n_, n_);
        internal::for_each_subset(m, n_, [&](const std::vector<int>& idx) {
            for (int c = 0; c < n_; ++c) sub.col(c) = g.reps.col(idx[c]);
            Eigen::FullPivLU<Matrix> lu(sub);
            double scale = 1.0;
            for (int c = 0; c < n_; ++c) scale *= sub.col(c).norm();
            if (!lu.isInvertible() || std::abs(lu.determinant()) <= 1e-12 * scale) return;
            for (long mask = 0; mask < (1L << n_); ++mask) {
                Matrix gs = sub;
                for (int c = 0; c < n_; ++c) {
                    if ((mask >> c) & 1) gs.col(c) = -gs.col(c);
                }
                bool on_boundary = false;
                for (const auto& u : probes) {
                    if (gauge_value(a, gs * lift(u)) >= 1.0 - 1e-7) {
                        on_boundary = true;
                        break;
                    }
                }
                if (!on_boundary) continue;
                Matrix pts(n_, static_cast<int>(grid_.size()));
                for (std::size_t k = 0; k < grid_.size(); ++k) pts.col(static_cast<int>(k)) = gs * lift(grid_[k]);
                patches_.push_back(gs);
                points_.push_back(std::move(pts));
            }
        });
    }

    Membership decide(const Vector& x) const override {
        struct Cand {
            double v;
            std::size_t patch;
            std::size_t k;
        };
        constexpr std::size_t kKeep = 4;
        std::vector<Cand> best;
        for (std::size_t pi = 0; pi < patches_.size(); ++pi) {
            const Matrix& pts = points_[pi];
            for (int k = 0; k < pts.cols(); ++k) {
                const double v = gauge_value(b_, x - pts.col(k));
                if (v <= 1.0 + kTol) return Membership::inside;
                if (best.size() < kKeep || v < best.back().v) {
                    best.push_back({v, pi, static_cast<std::size_t>(k)});
                    std::sort(best.begin(), best.end(), [](const Cand& l, const Cand& r) { return l.v < r.v; });
                    if (best.size() > kKeep) best.pop_back();
                }
            }
        }
        for (const auto& c : best) {
            if (refine(x, patches_[c.patch], grid_[c.k]) <= 1.0 + kTol) return Membership::inside;
        }
        return Membership::outside;
    }

    std::size_t patch_count() const { return patches_.size(); }

private:
    Vector lift(const Vector& u) const {
        if (p_ == 1.0) return u;
        return u.array().pow(1.0 / p_).matrix();
    }

    double refine(const Vector& x, const Matrix& gs, Vector w) const {
        auto value = [&](const Vector& ww) {
            const double s = ww.sum();
            if (s <= 0.0) return kInf;
            return gauge_value(b_, x - gs * lift(ww / s));
        };
        double best = value(w);
        double step = 0.5 / (n_ <= 2 ? 16 : 8);
        int evals = 0;
        while (step > 1e-9 && evals < 400) {
            bool improved = false;
            for (int i = 0; i < n_ && !improved; ++i) {
                for (double sgn : {1.0, -1.0}) {
                    Vector t = w;
                    t(i) = std::max(0.0, t(i) + sgn * step);
                    const double v = value(t);
                    ++evals;
                    if (v < best) {
                        best = v;
                        w = t;
                        improved = true;
                        break;
                    }
                }
            }
            if (best <= 1.0 + kTol) return best;
            if (!improved) step *= 0.5;
        }
        return best;
    }

    Body b_;
    int n_;
    double p_;
    std::vector<Vector> grid_;
    std::vector<Matrix> patches_;
    std::vector<Matrix> points_;
};

// ---------------------------------------------------------------------------

/// A + [-v, v]: minimize gauge_A(x - t v) over t in [-1, 1].
class SegmentSum final : public Strategy {
public:
    SegmentSum(const Body& a, const Vector& v) : a_(a), v_(v), convex_(a.is_convex()) {
        if (auto q = ellipsoid_shape(a)) q_ = *q;
    }

    Membership decide(const Vector& x) const override {
        if (q_) {
            const Matrix& q = *q_;
            const double t = std::clamp(v_.dot(q * x) / v_.dot(q * v_), -1.0, 1.0);
            const Vector r = x - t * v_;
            return r.dot(q * r) <= (1.0 + kTol) * (1.0 + kTol) ? Membership::inside : Membership::outside;
        }
        auto f = [&](double t) { return gauge_value(a_, x - t * v_); };
        double lo = -1.0;
        double hi = 1.0;
        if (!convex_) {
            constexpr int kGrid = 64;
            int arg = 0;
            double best = kInf;
            for (int i = 0; i <= kGrid; ++i) {
                const double v = f(-1.0 + 2.0 * i / kGrid);
                if (v <= 1.0 + kTol) return Membership::inside;
                if (v < best) {
                    best = v;
                    arg = i;
                }
            }
            lo = -1.0 + 2.0 * std::max(arg - 1, 0) / kGrid;
            hi = -1.0 + 2.0 * std::min(arg + 1, kGrid) / kGrid;
        }
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        double c = hi - g * (hi - lo);
        double d = lo + g * (hi - lo);
        double fc = f(c);
        double fd = f(d);
        for (int it = 0; it < 60; ++it) {
            if (std::min(fc, fd) <= 1.0 + kTol) return Membership::inside;
            if (fc < fd) {
                hi = d;
                d = c;
                fd = fc;
                c = hi - g * (hi - lo);
                fc = f(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + g * (hi - lo);
                fd = f(d);
            }
        }
        const double best = std::min({fc, fd, f(-1.0), f(1.0)});
        return best <= 1.0 + kTol ? Membership::inside : Membership::outside;
    }

private:
    Body a_;
    Vector v_;
    bool convex_;
    std::optional<Matrix> q_;
};

// ---------------------------------------------------------------------------

/// Generic fallback: the boundary of A is parametrized by directions,
/// a(theta) = theta / gauge_A(theta); minimize gauge_B(x - a(theta)). For two convex
/// bodies a separating direction (support-function test) certifies outside.
class BoundarySum final : public Strategy {
public:
    BoundarySum(const Body& a, const Body& b) : a_(a), b_(b), n_(a.dim()) {
        const int count = n_ == 2 ? 256 : (n_ == 3 ? 1000 : 2000);
        dirs_ = sphere_points(n_, count);
        for (const auto& d : dirs_) points_.push_back(d / gauge_value(a_, d));
        spacing_ = n_ == 2 ? 2.0 * M_PI / count : std::pow(4.0 * M_PI / count, 1.0 / (n_ - 1));
        convex_ = a.is_convex() && b.is_convex();
    }

    Membership decide(const Vector& x) const override {
        std::vector<std::pair<double, std::size_t>> scored;
        scored.reserve(dirs_.size());
        for (std::size_t k = 0; k < dirs_.size(); ++k) {
            const double v = gauge_value(b_, x - points_[k]);
            if (v <= 1.0 + kTol) return Membership::inside;
            scored.emplace_back(v, k);
        }
        std::partial_sort(scored.begin(), scored.begin() + 3, scored.end());
        for (int i = 0; i < 3; ++i) {
            const double v = local_search(dirs_[scored[i].second], [&](const Vector& th) {
                return gauge_value(b_, x - th / gauge_value(a_, th));
            });
            if (v <= 1.0 + kTol) return Membership::inside;
        }
        if (!convex_) return Membership::outside;
        // x is outside A + B iff <x, th> > h_A(th) + h_B(th) for some th.
        auto sep = [&](const Vector& th) { return -(x.dot(th) / (support(a_, th) + support(b_, th))); };
        std::vector<std::pair<double, std::size_t>> dual;
        for (std::size_t k = 0; k < dirs_.size(); ++k) {
            const double v = sep(dirs_[k]);
            if (v < -(1.0 + kTol)) return Membership::outside;
            dual.emplace_back(v, k);
        }
        std::partial_sort(dual.begin(), dual.begin() + 3, dual.end());
        for (int i = 0; i < 3; ++i) {
            if (local_search(dirs_[dual[i].second], sep) < -(1.0 + kTol)) return Membership::outside;
        }
        return Membership::indeterminate;
    }

private:
    template <class F>
    double local_search(Vector theta, F&& f) const {
        // Orthonormal tangent frame by Gram-Schmidt against theta.
        double best = f(theta);
        double step = spacing_;
        int evals = 0;
        while (step > 1e-9 && evals < 600) {
            Matrix frame(n_, n_);
            frame.col(0) = theta;
            for (int j = 1; j < n_; ++j) frame.col(j) = Vector::Unit(n_, j - 1);
            Eigen::HouseholderQR<Matrix> qr(frame);
            const Matrix q = qr.householderQ();
            bool improved = false;
            for (int j = 1; j < n_ && !improved; ++j) {
                for (double sgn : {1.0, -1.0}) {
                    const Vector cand = (theta + sgn * step * q.col(j)).normalized();
                    const double v = f(cand);
                    ++evals;
                    if (v < best) {
                        best = v;
                        theta = cand;
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        return best;
    }

    Body a_;
    Body b_;
    int n_;
    bool convex_ = false;
    double spacing_ = 0.1;
    std::vector<Vector> dirs_;
    std::vector<Vector> points_;
};

double gauge_cost(const Body& b) {
    if (b.as<shape::CapBody>()) return 100.0;
    if (const auto* t = b.as<shape::Transformed>()) return gauge_cost(*t->inner) + 1.0;
    if (b.data().solver) return static_cast<double>(b.data().solver->subset_count());
    return 1.0;
}

}  // namespace

struct SumOracle::Impl {
    explicit Impl(Body body) : a(std::move(body)) {}
    Body a;
    std::optional<Body> b;
    Vector segment;
    int n = 0;
    double radius = 0.0;
    Vector extents;
    std::optional<double> exact;
    std::string strategy;
    std::unique_ptr<Strategy> solver;

    double support_b(const Vector& th) const { return b ? support(*b, th) : std::abs(segment.dot(th)); }
};

namespace {

std::optional<double> parallel_ellipsoid_volume(const Body& a, const Body& b) {
    const auto qa = ellipsoid_shape(a);
    const auto qb = ellipsoid_shape(b);
    if (!qa || !qb) return std::nullopt;
    const double c = qb->trace() / qa->trace();
    if ((*qb - c * *qa).norm() > 1e-9 * qb->norm()) return std::nullopt;
    const int n = a.dim();
    const double factor = 1.0 + 1.0 / std::sqrt(c);
    return unit_ball_volume(n) / std::sqrt(qa->determinant()) * std::pow(factor, n);
}

}  // namespace

SumOracle::SumOracle(const Body& a, const Body& b) {
    if (a.dim() != b.dim()) throw DimensionError("SumOracle: dimension mismatch");
    auto impl = std::make_shared<Impl>(a);
    impl->b = b;
    impl->n = a.dim();
    impl->radius = a.outer_radius() + b.outer_radius();
    impl->extents = pcg::axis_extents(a) + pcg::axis_extents(b);

    const auto* ba = a.as<shape::Box>();
    const auto* bb = b.as<shape::Box>();
    if (ba && bb) {
        impl->exact = (2.0 * (ba->half_widths + bb->half_widths)).prod();
    } else {
        impl->exact = parallel_ellipsoid_volume(a, b);
    }

    const auto ga = generated(a);
    const auto gb = generated(b);
    const auto qa = ellipsoid_shape(a);
    const auto qb = ellipsoid_shape(b);
    const int n = impl->n;
    if (ga && gb && ga->p == 1.0 && gb->p == 1.0) {
        impl->solver = std::make_unique<LpSum>(ga->reps, gb->reps);
        impl->strategy = "linear_program";
    } else if (ga && gb && internal::binomial(static_cast<int>(ga->reps.cols() + gb->reps.cols()), n + 1) <= kEdgeSubsetCap) {
        impl->solver = std::make_unique<EdgeSum>(*ga, *gb);
        impl->strategy = "edge_enumeration";
    } else if (auto ca = convex_param(a); ca && qb) {
        impl->solver = std::make_unique<GradientSum>(*ca, *qb);
        impl->strategy = "projected_gradient";
    } else if (auto cb = convex_param(b); cb && qa) {
        impl->solver = std::make_unique<GradientSum>(*cb, *qa);
        impl->strategy = "projected_gradient";
    } else {
        auto patch_estimate = [&](const std::optional<Generated>& g) {
            if (!g) return kInf;
            return internal::binomial(static_cast<int>(g->reps.cols()), n) * std::ldexp(1.0, n);
        };
        const double pa = patch_estimate(ga);
        const double pb = patch_estimate(gb);
        if (std::min(pa, pb) <= kPatchCap) {
            if (pa <= pb) {
                impl->solver = std::make_unique<PatchSum>(a, *ga, b);
            } else {
                impl->solver = std::make_unique<PatchSum>(b, *gb, a);
            }
            impl->strategy = "boundary_patches";
        } else if (gauge_cost(a) >= gauge_cost(b)) {
            impl->solver = std::make_unique<BoundarySum>(a, b);
            impl->strategy = "boundary_search";
        } else {
            impl->solver = std::make_unique<BoundarySum>(b, a);
            impl->strategy = "boundary_search";
        }
    }
    impl_ = std::move(impl);
}

SumOracle::SumOracle(const Body& a, const Vector& v) {
    if (a.dim() != v.size()) throw DimensionError("SumOracle: dimension mismatch");
    if (!v.allFinite()) throw InvalidBodyError("SumOracle: non-finite segment");
    auto impl = std::make_shared<Impl>(a);
    impl->segment = v;
    impl->n = a.dim();
    impl->radius = a.outer_radius() + v.norm();
    impl->extents = pcg::axis_extents(a) + v.cwiseAbs();
    const int n = impl->n;
    if (auto q = ellipsoid_shape(a)) {
        const double shadow = n >= 2 ? unit_ball_volume(n - 1) : 1.0;
        impl->exact = (unit_ball_volume(n) + 2.0 * shadow * std::sqrt(v.dot(*q * v))) / std::sqrt(q->determinant());
        impl->solver = std::make_unique<SegmentSum>(a, v);
        impl->strategy = "segment_closed_form";
    } else if (auto g = generated(a); g && v.norm() > 0.0 &&
                                      internal::binomial(static_cast<int>(g->reps.cols()) + 1, n + 1) <= kEdgeSubsetCap) {
        Generated seg;
        seg.reps = v;
        seg.p = 1.0;
        if (g->p == 1.0) {
            impl->solver = std::make_unique<LpSum>(g->reps, seg.reps);
            impl->strategy = "linear_program";
        } else {
            impl->solver = std::make_unique<EdgeSum>(*g, seg);
            impl->strategy = "edge_enumeration";
        }
    } else {
        impl->solver = std::make_unique<SegmentSum>(a, v);
        impl->strategy = "segment_search";
    }
    if (const auto* bx = a.as<shape::Box>()) {
        int nonzero = 0;
        for (int i = 0; i < n; ++i) nonzero += v(i) != 0.0;
        if (nonzero <= 1) impl->exact = (2.0 * (bx->half_widths + v.cwiseAbs())).prod();
    }
    impl_ = std::move(impl);
}

int SumOracle::dim() const { return impl_->n; }
const Vector& SumOracle::axis_extents() const { return impl_->extents; }
std::optional<double> SumOracle::exact_volume() const { return impl_->exact; }
const std::string& SumOracle::strategy() const { return impl_->strategy; }

Membership SumOracle::contains(const Vector& x) const {
    const Impl& s = *impl_;
    if (x.size() != s.n) throw DimensionError("SumOracle::contains: dimension mismatch");
    const double r = x.norm();
    if (r == 0.0) return Membership::inside;
    if (r > s.radius * (1.0 + 1e-12)) return Membership::outside;
    if ((x.cwiseAbs().array() > s.extents.array() * (1.0 + 1e-12)).any()) return Membership::outside;

    // Radial split x = a + b with a, b on the ray through x.
    const double ga = gauge_value(s.a, x);
    double inv = ga > 0.0 ? 1.0 / ga : kInf;
    if (s.b) {
        const double gb = gauge_value(*s.b, x);
        inv += gb > 0.0 ? 1.0 / gb : kInf;
    }
    if (inv >= 1.0) return Membership::inside;

    const Vector theta = x / r;
    if (r > (support(s.a, theta) + s.support_b(theta)) * (1.0 + kTol)) return Membership::outside;
    return s.solver->decide(x);
}

}  // namespace pcg
