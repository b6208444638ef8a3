#include "pcg/metric.hpp"

#include "pcg/bodies.hpp"
#include "pcg/random.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace pcg {

namespace {

constexpr int kWitnessCount = 1000;
constexpr int kMaxSubdivision = 4;
constexpr std::size_t kMaxPruned = 4000;

/// b = F(inner) with inner in a friendlier coordinate system.
struct Frame {
    Matrix f;
    Body inner;
};

Frame frame_of(const Body& b) {
    if (const auto* t = b.as<shape::Transformed>()) return {t->map.matrix(), *t->inner};
    const int n = b.dim();
    if (b.as<shape::Ellipsoid>()) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(b.as<shape::Ellipsoid>()->shape);
        Matrix f = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal();
        return {f, Body::euclidean_ball(n)};
    }
    return {Matrix::Identity(n, n), b};
}

bool solid(const Body& b) { return b.is_convex() || b.as<shape::StandardBall>() || b.as<shape::Box>(); }

/// Upper bound on sup of the gauge of b over the parallelepiped F [-1, 1]^n.
double cube_radius(const Body& b, const Matrix& f) {
    const int n = b.dim();
    if (b.is_convex()) {
        double best = 0.0;
        for (long mask = 0; mask < (1L << (n - 1)); ++mask) {
            Vector s = Vector::Ones(n);
            for (int i = 1; i < n; ++i) {
                if (mask & (1L << (i - 1))) s(i) = -1.0;
            }
            best = std::max(best, gauge_value(b, f * s));
        }
        return best;
    }
    const double p = b.p();
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += std::pow(gauge_value(b, f.col(i)), p);
    return std::pow(total, 1.0 / p);
}

/// Half-width of the largest cube of the frame inside the unit ball of inner.
double inner_cube_half_width(const Body& inner) {
    const int n = inner.dim();
    const Matrix id = Matrix::Identity(n, n);
    if (solid(inner)) {
        double best = 0.0;
        for (long mask = 0; mask < (1L << (n - 1)); ++mask) {
            Vector s = Vector::Ones(n);
            for (int i = 1; i < n; ++i) {
                if (mask & (1L << (i - 1))) s(i) = -1.0;
            }
            best = std::max(best, gauge_value(inner, s));
        }
        return 1.0 / best;
    }
    return 1.0 / cube_radius(inner, id);
}

double lower_gauge(const Body& b, const Vector& x) {
    const GaugeResult g = gauge(b, x);
    return g.is_upper_bound ? g.lower_bound : g.value;
}

struct Region {
    Vector center;   // translate position (inside a)
    Vector cell;     // center of the cell it is responsible for
    double half = 0; // half-width of that cell in frame coordinates
};

class CoverBuilder {
public:
    CoverBuilder(const Body& a, const Body& b, double scale, std::uint64_t seed)
        : a_(a), b_(b), scale_(scale), seed_(seed), frame_(frame_of(b)), n_(a.dim()) {
        h_ = scale * inner_cube_half_width(frame_.inner);
        rho_a_ = cube_radius(a, frame_.f);
        rho_b_ = cube_radius(b, frame_.f);
        pa_ = a.p();
        pb_ = b.p();
        reach_ = scale * b.outer_radius();
        cell_radius_ = frame_.f.norm() * std::sqrt(static_cast<double>(n_));
        if (!a.is_convex()) {
            try {
                hull_ = convex_hull(a);
                rho_hull_ = cube_radius(*hull_, frame_.f);
            } catch (const UnsupportedError&) {
                hull_.reset();
            }
        }
        const Body local = transformed(LinearMap(frame_.f).inverse(), a);
        extents_ = axis_extents(local);
    }

    double half_width() const { return h_; }

    /// Builds the net; when target > 0 pruning stops as soon as the size reaches target
    /// and hopeless lattices return early.
    std::vector<Region> build(double offset, std::size_t target) const {
        std::vector<long> lo(n_), count(n_);
        double total = 1.0;
        for (int i = 0; i < n_; ++i) {
            const double reach = extents_(i) + h_;
            lo[i] = static_cast<long>(std::ceil((-reach - offset) / (2 * h_) - 1e-9));
            const long hi = static_cast<long>(std::floor((reach - offset) / (2 * h_) + 1e-9));
            count[i] = std::max(0L, hi - lo[i] + 1);
            total *= static_cast<double>(count[i]);
        }
        if (total > static_cast<double>(kLatticeCandidateCap)) {
            throw ResourceError("covering_upper: lattice candidates exceed the cap of " +
                                std::to_string(kLatticeCandidateCap));
        }
        const auto cells = static_cast<std::size_t>(total);
        std::vector<std::vector<Region>> found(cells);
        parallel_for(cells, [&](std::size_t idx) {
            Vector z(n_);
            std::size_t rest = idx;
            for (int i = n_ - 1; i >= 0; --i) {
                const long j = lo[i] + static_cast<long>(rest % static_cast<std::size_t>(count[i]));
                rest /= static_cast<std::size_t>(count[i]);
                z(i) = offset + 2 * h_ * static_cast<double>(j);
            }
            place(frame_.f * z, h_, 0, found[idx]);
        });
        std::vector<Region> regions;
        for (auto& f : found) {
            for (auto& r : f) regions.push_back(std::move(r));
        }
        if (target > 0 && regions.size() > 8 * target + 64) return regions;
        prune(regions, target);
        return regions;
    }

private:
    bool may_meet(const Vector& c, double half) const {
        if (hull_ && gauge_value(*hull_, c) > 1.0 + rho_hull_ * half + 1e-12) return false;
        const double lb = lower_gauge(a_, c);
        if (lb <= 1.0) return true;
        return std::pow(lb, pa_) <= 1.0 + std::pow(rho_a_ * half, pa_) + 1e-12;
    }

    void place(const Vector& c, double half, int depth, std::vector<Region>& out) const {
        if (!may_meet(c, half)) return;
        if (contains(a_, c)) {
            out.push_back({c, c, half});
            return;
        }
        if (depth > 0) {
            // Any point of the cell works as a center once the cell is at most half size.
            const int side = depth == kMaxSubdivision ? 7 : 3;
            if (auto x = grid_point(c, half, side)) {
                out.push_back({*x, c, half});
                return;
            }
            if (depth == kMaxSubdivision) {
                // Slivers the exclusion bounds cannot rule out: radial boundary point when
                // its translate provably contains the cell, otherwise the cell is dropped.
                const Vector x = c / (gauge_value(a_, c) * (1 + 1e-12));
                const double gap = gauge_value(b_, c - x);
                const double bound = std::pow(std::pow(rho_b_ * half, pb_) + std::pow(gap, pb_), 1.0 / pb_);
                if (bound <= scale_ && contains(a_, x)) out.push_back({x, c, half});
                return;
            }
        }
        const double child = 0.5 * half;
        for (long mask = 0; mask < (1L << n_); ++mask) {
            Vector s(n_);
            for (int i = 0; i < n_; ++i) s(i) = (mask & (1L << i)) ? child : -child;
            place(c + frame_.f * s, child, depth + 1, out);
        }
    }

    std::optional<Vector> grid_point(const Vector& c, double half, int side) const {
        long grid = 1;
        for (int i = 0; i < n_; ++i) grid *= side;
        for (long g = 0; g < grid; ++g) {
            Vector t(n_);
            long rest = g;
            for (int i = 0; i < n_; ++i) {
                t(i) = 2.0 * static_cast<double>(rest % side) / (side - 1) - 1.0;
                rest /= side;
            }
            const Vector x = c + frame_.f * (half * t);
            if (contains(a_, x)) return x;
        }
        return std::nullopt;
    }

    bool covered_by(const Vector& w, const Vector& center) const {
        if ((w - center).norm() > reach_ * (1 + 1e-12)) return false;
        return gauge_value(b_, w - center) <= scale_ * (1 + 1e-12);
    }

    void prune(std::vector<Region>& regions, std::size_t target) const {
        const std::size_t m = regions.size();
        if (m <= 1 || m > kMaxPruned || (target > 0 && m <= target)) return;
        std::vector<std::vector<Vector>> witnesses(m);
        parallel_for(m, [&](std::size_t i) {
            Rng rng = make_rng(seed_, 0x300 + i);
            for (int k = 0; k < kWitnessCount; ++k) {
                Vector u(n_);
                for (int d = 0; d < n_; ++d) u(d) = uniform(rng, -1.0, 1.0);
                const Vector w = regions[i].cell + frame_.f * (regions[i].half * u);
                if (contains(a_, w)) witnesses[i].push_back(w);
            }
        });
        std::vector<std::size_t> first(m + 1, 0);
        for (std::size_t i = 0; i < m; ++i) first[i + 1] = first[i] + witnesses[i].size();
        std::vector<std::vector<std::size_t>> neighbors(m);
        parallel_for(m, [&](std::size_t i) {
            const double r = regions[i].half * cell_radius_ + reach_;
            for (std::size_t j = 0; j < m; ++j) {
                if (j != i && (regions[j].center - regions[i].cell).norm() <= r * (1 + 1e-9)) neighbors[i].push_back(j);
            }
        });
        // covering[j] lists the witness ids inside translate j.
        std::vector<std::vector<std::size_t>> covering(m);
        std::vector<std::vector<std::size_t>> hits(m);
        parallel_for(m, [&](std::size_t i) {
            std::vector<std::size_t> near = neighbors[i];
            near.push_back(i);
            for (std::size_t j : near) {
                for (std::size_t k = 0; k < witnesses[i].size(); ++k) {
                    if (covered_by(witnesses[i][k], regions[j].center)) {
                        hits[i].push_back(j);
                        hits[i].push_back(first[i] + k);
                    }
                }
            }
        });
        std::vector<int> count(first[m], 0);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t t = 0; t < hits[i].size(); t += 2) {
                covering[hits[i][t]].push_back(hits[i][t + 1]);
                ++count[hits[i][t + 1]];
            }
        }
        std::vector<char> alive(m, 1);
        std::size_t size = m;
        for (std::size_t i = 0; i < m; ++i) {
            if (target > 0 && size <= target) break;
            bool removable = true;
            for (std::size_t w : covering[i]) {
                if (count[w] < 2) {
                    removable = false;
                    break;
                }
            }
            if (!removable) continue;
            for (std::size_t w : covering[i]) --count[w];
            alive[i] = 0;
            --size;
        }
        // Repair: a removed center comes back when a fine grid of its cell finds a gap.
        const int side = n_ <= 2 ? 33 : (n_ == 3 ? 13 : 7);
        for (std::size_t i = 0; i < m; ++i) {
            if (alive[i]) continue;
            const std::vector<std::size_t>& near = neighbors[i];
            bool gap = false;
            long grid = 1;
            for (int d = 0; d < n_ && !gap; ++d) grid *= side;
            for (long g = 0; g < grid && !gap; ++g) {
                Vector t(n_);
                long rest = g;
                for (int d = 0; d < n_; ++d) {
                    t(d) = 2.0 * static_cast<double>(rest % side) / (side - 1) - 1.0;
                    rest /= side;
                }
                const Vector w = regions[i].cell + frame_.f * (regions[i].half * t);
                if (!contains(a_, w)) continue;
                bool ok = false;
                for (std::size_t j : near) {
                    if (alive[j] && covered_by(w, regions[j].center)) {
                        ok = true;
                        break;
                    }
                }
                gap = !ok;
            }
            if (gap) alive[i] = 1;
        }
        std::vector<Region> kept;
        for (std::size_t i = 0; i < m; ++i) {
            if (alive[i]) kept.push_back(std::move(regions[i]));
        }
        regions = std::move(kept);
    }

    const Body& a_;
    const Body& b_;
    double scale_;
    std::uint64_t seed_;
    Frame frame_;
    int n_;
    double h_ = 0.0;
    double rho_a_ = 0.0;
    double rho_b_ = 0.0;
    double pa_ = 1.0;
    double pb_ = 1.0;
    double reach_ = 0.0;
    double cell_radius_ = 0.0;
    Vector extents_;
    std::optional<Body> hull_;
    double rho_hull_ = 0.0;
};

void check_pair(const Body& a, const Body& b, double scale) {
    if (a.dim() != b.dim()) throw DimensionError("covering_upper: dimension mismatch");
    if (a.dim() > kMaxCoveringDimension) {
        throw DimensionError("covering_upper: dimension exceeds the covering cap of " +
                             std::to_string(kMaxCoveringDimension));
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidBodyError("covering_upper: scale must be positive");
}

std::vector<Vector> cover_centers(const Body& a, const Body& b, double scale, std::uint64_t seed,
                                  std::size_t target) {
    if (certified_subset(a, scaled(b, scale), 1000, seed)) return {Vector::Zero(a.dim())};
    const CoverBuilder builder(a, b, scale, seed);
    std::optional<std::vector<Region>> best;
    std::optional<ResourceError> failure;
    for (double offset : {0.0, builder.half_width()}) {
        try {
            std::vector<Region> r = builder.build(offset, target);
            if (!best || r.size() < best->size()) best = std::move(r);
        } catch (const ResourceError& e) {
            failure = e;
        }
    }
    if (!best) throw *failure;
    std::vector<Vector> centers;
    centers.reserve(best->size());
    for (auto& r : *best) centers.push_back(std::move(r.center));
    return centers;
}

double volume_ratio_lower(const Body& a, const Body& b, double scale, long budget, std::uint64_t seed) {
    const VolumeEstimate va = volume(a, budget, derive_seed(seed, 0x41));
    const VolumeEstimate vb = volume(b, budget, derive_seed(seed, 0x42));
    const double denom = (vb.value + 3 * vb.std_error) * std::pow(scale, a.dim());
    return std::max(0.0, va.value - 3 * va.std_error) / denom;
}

bool same_body(const Body& x, const Body& y) {
    if (&x.data() == &y.data()) return true;
    if (x.dim() != y.dim()) return false;
    for (const auto& d : sphere_points(x.dim(), 200)) {
        const double gx = gauge_value(x, d);
        const double gy = gauge_value(y, d);
        if (std::abs(gx - gy) > 1e-9 * std::max(gx, gy)) return false;
    }
    return true;
}

Matrix sqrt_spd(const Matrix& a, bool inverse) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    const Vector ev = es.eigenvalues();
    if (ev.minCoeff() <= 0.0 || ev.maxCoeff() / ev.minCoeff() > 1e12) {
        throw InvalidBodyError("kolmogorov_numbers_ellipsoid: ill-conditioned shape matrix");
    }
    const Vector d = inverse ? Vector(ev.cwiseSqrt().cwiseInverse()) : Vector(ev.cwiseSqrt());
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

bool covers(const CoverCertificate& cert, const Vector& x) {
    const double reach = cert.target_scale * cert.covering_body.outer_radius() * (1 + 1e-12);
    for (const auto& c : cert.centers) {
        if ((x - c).norm() > reach) continue;
        if (gauge_value(cert.covering_body, x - c) <= cert.target_scale * (1 + 1e-12)) return true;
    }
    return false;
}

long uncovered_samples(const CoverCertificate& cert, long samples, std::uint64_t seed) {
    const Body& a = cert.covered_body;
    const Vector h = axis_extents(a);
    Rng rng = make_rng(seed, 0x310);
    long drawn = 0;
    long missed = 0;
    for (long attempts = 0; drawn < samples; ++attempts) {
        if (attempts > 1000 * samples) throw ConvergenceError("uncovered_samples: rejection sampling stalled");
        Vector x(a.dim());
        for (int i = 0; i < a.dim(); ++i) x(i) = uniform(rng, -h(i), h(i));
        if (!contains(a, x)) continue;
        ++drawn;
        if (!covers(cert, x)) ++missed;
    }
    return missed;
}

CoverCertificate covering_upper(const Body& a, const Body& b, double scale, long budget, std::uint64_t seed) {
    check_pair(a, b, scale);
    CoverCertificate cert{cover_centers(a, b, scale, seed, 0), scale, a, b, 0.0};
    cert.lower_bound = volume_ratio_lower(a, b, scale, budget, seed);
    return cert;
}

CoverCertificate compose_covers(const CoverCertificate& c1, const CoverCertificate& c2) {
    if (!same_body(c1.covering_body, c2.covered_body)) {
        throw InvalidBodyError("compose_covers: covering body of the first certificate differs from the covered body of the second");
    }
    const double s1 = c1.target_scale;
    std::vector<Vector> centers;
    centers.reserve(c1.size() * c2.size());
    for (const auto& x : c1.centers) {
        for (const auto& y : c2.centers) centers.push_back(x + s1 * y);
    }
    return CoverCertificate{std::move(centers), s1 * c2.target_scale, c1.covered_body, c2.covering_body,
                            c1.lower_bound * c2.lower_bound};
}

std::string to_string(SNumberKind k) { return k == SNumberKind::kolmogorov ? "kolmogorov" : "entropy"; }

double operator_norm(const LinearMap& u, const Body& domain, const Body& codomain) {
    const int n = domain.dim();
    if (codomain.dim() != n || u.dim() != n) throw DimensionError("operator_norm: dimension mismatch");
    const auto qa = ellipsoid_shape(domain);
    const auto qb = ellipsoid_shape(codomain);
    if (qa && qb) {
        const Matrix m = sqrt_spd(*qb, false) * u.matrix() * sqrt_spd(*qa, true);
        return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
    }
    double best = 0.0;
    if (const GeneratorForm* g = domain.generator_form()) {
        for (const auto& r : g->reps) best = std::max(best, gauge_value(codomain, u.apply(r)));
        if (g->p <= codomain.p()) return best;
    }
    auto value = [&](const Vector& d) { return gauge_value(codomain, u.apply(d)) / gauge_value(domain, d); };
    std::vector<std::pair<double, Vector>> ranked;
    for (const auto& d : sphere_points(n, 2000)) ranked.emplace_back(value(d), d);
    std::partial_sort(ranked.begin(), ranked.begin() + 4, ranked.end(),
                      [](const auto& l, const auto& r) { return l.first > r.first; });
    for (int s = 0; s < 4; ++s) {
        auto [v, d] = ranked[s];
        double step = 0.05;
        while (step > 1e-9) {
            bool moved = false;
            for (int i = 0; i < n; ++i) {
                for (double sign : {1.0, -1.0}) {
                    Vector t = d;
                    t(i) += sign * step;
                    t.normalize();
                    const double tv = value(t);
                    if (tv > v) {
                        v = tv;
                        d = t;
                        moved = true;
                    }
                }
            }
            if (!moved) step *= 0.5;
        }
        best = std::max(best, v);
    }
    return best;
}

SNumberSequence entropy_numbers(const LinearMap& u, const Body& domain, const Body& codomain, int k_max, long budget,
                                std::uint64_t seed) {
    const int n = domain.dim();
    if (codomain.dim() != n || u.dim() != n) throw DimensionError("entropy_numbers: dimension mismatch");
    if (k_max < 1 || k_max > 4 * n) throw InvalidBodyError("entropy_numbers: k_max must lie in [1, 4n]");
    const Body image = transformed(u, domain);
    SNumberSequence out{SNumberKind::entropy, {}, {}, domain, codomain, u};
    const double norm = operator_norm(u, domain, codomain);
    const double ratio = volume_ratio_lower(image, codomain, 1.0, budget, seed);
    out.values.push_back(norm);
    out.lower_bounds.push_back(std::min(norm, std::pow(ratio, 1.0 / n)));
    for (int k = 2; k <= k_max; ++k) {
        const auto target = static_cast<std::size_t>(1) << (k - 1);
        const double vol_lb = std::pow(ratio / static_cast<double>(target), 1.0 / n);
        double hi = out.values.back();
        double lo = std::max(1e-3, vol_lb);
        if (lo < hi) {
            for (int it = 0; it < 40; ++it) {
                const double mid = 0.5 * (lo + hi);
                bool feasible = false;
                try {
                    feasible = cover_centers(image, codomain, mid, derive_seed(seed, 0x500 + k), target).size() <= target;
                } catch (const ResourceError&) {
                    feasible = false;
                }
                (feasible ? hi : lo) = mid;
            }
        }
        out.values.push_back(hi);
        out.lower_bounds.push_back(std::min(hi, vol_lb));
    }
    return out;
}

SNumberSequence kolmogorov_numbers_ellipsoid(const Body& e1, const Body& e2, int k_max) {
    return kolmogorov_numbers_ellipsoid(e1, e2, LinearMap::identity(e1.dim()), k_max);
}

SNumberSequence kolmogorov_numbers_ellipsoid(const Body& e1, const Body& e2, const LinearMap& u, int k_max) {
    const int n = e1.dim();
    if (e2.dim() != n || u.dim() != n) throw DimensionError("kolmogorov_numbers_ellipsoid: dimension mismatch");
    const auto q1 = ellipsoid_shape(e1);
    const auto q2 = ellipsoid_shape(e2);
    if (!q1 || !q2) throw UnsupportedError("kolmogorov_numbers_ellipsoid: both bodies must be ellipsoids");
    if (k_max < 0) k_max = n + 1;
    const Matrix m = sqrt_spd(*q2, false) * u.matrix() * sqrt_spd(*q1, true);
    const Vector sv = Eigen::JacobiSVD<Matrix>(m).singularValues();
    SNumberSequence out{SNumberKind::kolmogorov, {}, {}, e1, e2, u};
    for (int k = 1; k <= k_max; ++k) out.values.push_back(k <= n ? sv(k - 1) : 0.0);
    out.lower_bounds = out.values;
    return out;
}

double carl_ratio(const SNumberSequence& entropy, const SNumberSequence& kolmogorov, double alpha) {
    if (!(alpha > 0.0)) throw InvalidBodyError("carl_ratio: alpha must be positive");
    auto sup = [alpha](const std::vector<double>& v) {
        double s = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k) s = std::max(s, std::pow(static_cast<double>(k + 1), alpha) * v[k]);
        return s;
    };
    const double den = sup(kolmogorov.values);
    if (den <= 0.0) throw InvalidBodyError("carl_ratio: Kolmogorov numbers vanish");
    return sup(entropy.values) / den;
}

double carl_ratio(const LinearMap& u, const Body& domain, const Body& codomain, double alpha, int k_max, long budget,
                  std::uint64_t seed) {
    const SNumberSequence d = kolmogorov_numbers_ellipsoid(domain, codomain, u, std::min(k_max, domain.dim()));
    const SNumberSequence e = entropy_numbers(u, domain, codomain, k_max, budget, seed);
    return carl_ratio(e, d, alpha);
}

Lemma2Check lemma2_iii_check(const Body& a1, const Body& a2, const std::optional<Body>& k, const CoverCertificate& cert,
                             long budget, std::uint64_t seed) {
    if (!same_body(cert.covered_body, a1) || !same_body(cert.covering_body, a2)) {
        throw InvalidBodyError("lemma2_iii_check: certificate does not witness N(a1, a2)");
    }
    const Body a2s = scaled(a2, cert.target_scale);
    const VolumeEstimate lhs = k ? volume_sum(a1, *k, budget, derive_seed(seed, 1)) : volume(a1, budget, derive_seed(seed, 1));
    const VolumeEstimate rhs = k ? volume_sum(a2s, *k, budget, derive_seed(seed, 2)) : volume(a2s, budget, derive_seed(seed, 2));
    Lemma2Check out;
    const double n = static_cast<double>(cert.size());
    out.cover_size = cert.size();
    out.lhs = lhs.value;
    out.lhs_std_error = lhs.std_error;
    out.rhs = n * rhs.value;
    out.rhs_std_error = n * rhs.std_error;
    out.holds = out.lhs <= out.rhs + 3 * std::hypot(out.lhs_std_error, out.rhs_std_error) + 1e-12 * out.rhs;
    return out;
}

}  // namespace pcg
