#include "pcg/experiments.hpp"

#include "pcg/bodies.hpp"
#include "pcg/ellipsoids.hpp"
#include "pcg/metric.hpp"
#include "pcg/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

namespace pcg {

namespace {

constexpr double kSigmas = 3.0;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kWitnessCapEps = 0.05;
constexpr int kMaxCoverDimension = 3;

struct Radius {
    double value;
    double std_error;
};

/// |K|^{1/n} with its delta-method error.
Radius volume_radius(const VolumeEstimate& v, int n) {
    const double r = std::pow(v.value, 1.0 / n);
    return {r, v.value > 0.0 ? r / n * v.std_error / v.value : 0.0};
}

double rel(double value, double err) { return value != 0.0 ? err / value : 0.0; }

ExperimentRow make_row(std::string id, std::string descriptor, double lhs, double lhs_err, double rhs, double rhs_err) {
    ExperimentRow r;
    r.instance_id = std::move(id);
    r.descriptor = std::move(descriptor);
    r.lhs = lhs;
    r.rhs = rhs;
    r.ratio = lhs / rhs;
    r.std_error = std::abs(r.ratio) * std::hypot(rel(lhs, lhs_err), rel(rhs, rhs_err));
    return r;
}

ExperimentRow failed_row(std::string id, std::string descriptor, const std::exception& e) {
    ExperimentRow r;
    r.instance_id = std::move(id);
    r.descriptor = std::move(descriptor);
    r.lhs = r.rhs = r.ratio = r.std_error = kNaN;
    r.error = e.what();
    return r;
}

ExperimentReport new_report(const std::string& name, const CorpusSpec& spec, const ExperimentOptions& options,
                            std::string fitted_rule) {
    spec.validate();
    if (options.mc_budget < kMinBudget) {
        throw ResourceError(fmt::format("mc_budget {} is below the minimum of {}", options.mc_budget, kMinBudget));
    }
    ExperimentReport r;
    r.name = name;
    r.dimension = spec.dim;
    r.p = spec.p;
    r.seed = spec.seed;
    r.config_hash = config_hash(name, spec, options);
    r.summary.fitted_rule = std::move(fitted_rule);
    return r;
}

std::uint64_t instance_seed(const CorpusSpec& spec, std::size_t i) { return derive_seed(spec.seed, 0x10000 + i); }

/// Evaluates every instance (in parallel), recording failures; resource caps propagate.
template <class Item>
std::vector<ExperimentRow> evaluate(const std::vector<Item>& items,
                                    const std::function<std::vector<ExperimentRow>(const Item&, std::size_t)>& f) {
    std::vector<std::vector<ExperimentRow>> rows(items.size());
    parallel_for(items.size(), [&](std::size_t i) {
        try {
            rows[i] = f(items[i], i);
        } catch (const ResourceError&) {
            throw;
        } catch (const Error& e) {
            rows[i] = {failed_row(items[i].id, items[i].descriptor, e)};
        }
    });
    std::vector<ExperimentRow> out;
    for (auto& r : rows) {
        for (auto& x : r) out.push_back(std::move(x));
    }
    return out;
}

double ball_volume_product(int n) { return std::pow(unit_ball_volume(n), 2.0 / n); }

void require_lower(ExperimentReport& report, double bound, const char* what) {
    for (const auto& r : report.rows) {
        if (!r.error.empty()) continue;
        if (r.ratio < bound - kSigmas * r.std_error) {
            report.violations.push_back(fmt::format("{} {}: ratio {:.17g} < {} - 3 sigma (sigma {:.3g})", what,
                                                    r.instance_id, r.ratio, bound, r.std_error));
        }
    }
}

void require_upper(ExperimentReport& report, double bound, const char* what) {
    for (const auto& r : report.rows) {
        if (!r.error.empty()) continue;
        if (r.ratio > bound + kSigmas * r.std_error) {
            report.violations.push_back(fmt::format("{} {}: ratio {:.17g} > {} + 3 sigma (sigma {:.3g})", what,
                                                    r.instance_id, r.ratio, bound, r.std_error));
        }
    }
}

ExperimentRow volume_product_row(const std::string& id, const std::string& desc, const Body& b, const CorpusSpec& spec,
                                 long budget, std::uint64_t seed) {
    const VolumeEstimate s = volume_product(b, budget, seed);
    auto row = make_row(id, desc, s.value, s.std_error, ball_volume_product(spec.dim), 0.0);
    row.extras.emplace_back("c_p_candidate", s.value / std::pow(ball_volume_product(spec.dim), 1.0 / spec.p));
    return row;
}

}  // namespace

std::optional<double> ExperimentRow::extra(const std::string& key) const {
    for (const auto& [k, v] : extras) {
        if (k == key) return v;
    }
    return std::nullopt;
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidBodyError("log_slope: need at least two points");
    double mx = 0.0, my = 0.0;
    const double m = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]) / m;
        my += std::log(y[i]) / m;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    if (sxx == 0.0) throw InvalidBodyError("log_slope: x values coincide");
    return sxy / sxx;
}

void summarize(ExperimentReport& report) {
    ExperimentSummary& s = report.summary;
    s.failed = 0;
    double lo = INFINITY, hi = -INFINITY, sum = 0.0;
    int ok = 0;
    double fitted = kNaN;
    for (const auto& r : report.rows) {
        if (!r.error.empty()) {
            ++s.failed;
            continue;
        }
        lo = std::min(lo, r.ratio);
        hi = std::max(hi, r.ratio);
        sum += r.ratio;
        ++ok;
    }
    if (ok == 0) {
        s.min_ratio = s.max_ratio = s.mean_ratio = s.fitted_constant = kNaN;
        return;
    }
    s.min_ratio = lo;
    s.max_ratio = hi;
    s.mean_ratio = sum / ok;
    if (s.fitted_rule == "min ratio") {
        fitted = lo;
    } else if (s.fitted_rule == "max ratio") {
        fitted = hi;
    } else if (s.fitted_rule == "max two-sided ratio") {
        fitted = std::max(hi, 1.0 / lo);
    } else if (s.fitted_rule == "min c_p_candidate") {
        fitted = INFINITY;
        for (const auto& r : report.rows) {
            if (auto c = r.extra("c_p_candidate"); c && r.error.empty()) fitted = std::min(fitted, *c);
        }
    } else {
        throw InvalidBodyError(fmt::format("unknown fitted rule '{}'", s.fitted_rule));
    }
    s.fitted_constant = fitted;
}

std::string config_hash(const std::string& name, const CorpusSpec& spec, const ExperimentOptions& options) {
    const std::string canonical = fmt::format(
        "experiment={};family={};dim={};p={:.17g};count={};seed={};mc_budget={};alpha={}", name,
        spec.family_string(), spec.dim, spec.p, spec.count, spec.seed, options.mc_budget,
        options.alpha ? fmt::format("{:.17g}", *options.alpha) : std::string("default"));
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return fmt::format("{:016x}", h);
}

ExperimentReport run_brunn_minkowski(const CorpusSpec& spec, const ExperimentOptions& options) {
    auto report = new_report("brunn_minkowski", spec, options, "min ratio");
    const int n = spec.dim;
    const long budget = options.mc_budget;
    const auto pairs = generate_pairs(spec);
    report.rows = evaluate<CorpusPair>(pairs, [&](const CorpusPair& pr, std::size_t i) {
        const std::uint64_t seed = instance_seed(spec, i);
        const auto sum = volume_radius(volume_sum(pr.first, pr.second, budget, derive_seed(seed, 1)), n);
        const auto r1 = volume_radius(volume(pr.first, budget, derive_seed(seed, 2)), n);
        const auto r2 = volume_radius(volume(pr.second, budget, derive_seed(seed, 3)), n);
        return std::vector<ExperimentRow>{make_row(pr.id, pr.descriptor, sum.value, sum.std_error, r1.value + r2.value,
                                                   std::hypot(r1.std_error, r2.std_error))};
    });
    summarize(report);
    require_lower(report, 1.0, "Brunn-Minkowski");
    return report;
}

ExperimentReport run_reverse_bm(const CorpusSpec& spec, const ExperimentOptions& options) {
    return run_reverse_bm(spec, generate_pairs(spec), options);
}

ExperimentReport run_reverse_bm(const CorpusSpec& spec, const std::vector<CorpusPair>& pairs,
                                const ExperimentOptions& options) {
    auto report = new_report("reverse_bm", spec, options, "max ratio");
    const int n = spec.dim;
    const long budget = options.mc_budget;
    const double omega = std::pow(unit_ball_volume(n), 1.0 / n);
    for (const auto& pr : pairs) {
        if (pr.first.dim() != n || pr.second.dim() != n) throw DimensionError("reverse_bm: pair dimension mismatch");
    }
    report.rows = evaluate<CorpusPair>(pairs, [&](const CorpusPair& pr, std::size_t i) {
        const std::uint64_t seed = instance_seed(spec, i);
        const PositionedPair pp = position_pair(pr.first, pr.second, budget, derive_seed(seed, 1));
        const LinearMap t = positioning_map(pp);
        const auto positioned =
            volume_radius(volume_sum(transformed(t, pr.first), pr.second, budget, derive_seed(seed, 2)), n);
        const auto plain = volume_radius(volume_sum(pr.first, pr.second, budget, derive_seed(seed, 3)), n);
        const double rhs = (pp.alpha1 + pp.alpha2) * omega;
        const double rhs_err = std::hypot(pp.alpha1_std_error, pp.alpha2_std_error) * omega;
        auto row = make_row(pr.id, pr.descriptor, positioned.value, positioned.std_error, rhs, rhs_err);
        const auto unpositioned = make_row(pr.id, pr.descriptor, plain.value, plain.std_error, rhs, rhs_err);
        row.extras = {{"unpositioned_ratio", unpositioned.ratio},
                      {"unpositioned_std_error", unpositioned.std_error},
                      {"alpha1", pp.alpha1},
                      {"alpha2", pp.alpha2},
                      {"rho1", pp.rho1},
                      {"rho2", pp.rho2}};
        return std::vector<ExperimentRow>{row};
    });
    summarize(report);
    return report;
}

ExperimentReport run_santalo(const CorpusSpec& spec, const ExperimentOptions& options) {
    auto report = new_report("santalo", spec, options, "min ratio");
    const auto bodies = generate_bodies(spec);
    report.rows = evaluate<CorpusBody>(bodies, [&](const CorpusBody& cb, std::size_t i) {
        auto row = volume_product_row(cb.id, cb.descriptor, cb.body, spec, options.mc_budget, instance_seed(spec, i));
        row.extras.clear();
        return std::vector<ExperimentRow>{row};
    });
    summarize(report);
    require_upper(report, 1.0, "Blaschke-Santalo");
    return report;
}

ExperimentReport run_prop1(const CorpusSpec& spec, const ExperimentOptions& options) {
    auto report = new_report("prop1", spec, options, "min c_p_candidate");
    const int n = spec.dim;
    const long budget = options.mc_budget;
    auto items = generate_bodies(spec);
    const std::string head = fmt::format("p={} n={}", spec.p, n);
    items.push_back({"witness_lp_ball", "sharpness witness (lower end): StandardBall " + head,
                     Body::standard_ball(spec.p, n)});
    items.push_back({"witness_cap_body", fmt::format("sharpness witness (upper end): CapBody eps={} {}", kWitnessCapEps, head),
                     Body::cap_body(n, kWitnessCapEps, spec.p)});
    report.rows = evaluate<CorpusBody>(items, [&](const CorpusBody& cb, std::size_t i) {
        const std::uint64_t seed = instance_seed(spec, i);
        auto row = volume_product_row(cb.id, cb.descriptor, cb.body, spec, budget, seed);
        const Body hull = convex_hull(cb.body);
        const VolumeEstimate vb = volume(cb.body, budget, derive_seed(seed, 7));
        const VolumeEstimate vh = volume(hull, budget, derive_seed(seed, 8));
        row.extras.emplace_back("hull_volume_ratio", vh.value / vb.value);
        if (n <= kMaxCoverDimension) {
            try {
                const auto cert = covering_upper(hull, cb.body, 1.0, budget, derive_seed(seed, 9));
                const double size = static_cast<double>(cert.size());
                row.extras.emplace_back("cover_hull_by_body", size);
                row.extras.emplace_back("cover_hull_by_body_root_n", std::pow(size, 1.0 / n));
            } catch (const ResourceError&) {
            }
        }
        return std::vector<ExperimentRow>{row};
    });
    summarize(report);
    require_upper(report, 1.0, "Proposition 1 upper bound");
    return report;
}

ExperimentReport run_prop2(const CorpusSpec& spec, const ExperimentOptions& options) {
    auto report = new_report("prop2", spec, options, "max ratio");
    const int n = spec.dim;
    const double envelope = std::pow(static_cast<double>(n), 1.0 / spec.p - 1.0);
    const auto bodies = generate_bodies(spec);
    report.rows = evaluate<CorpusBody>(bodies, [&](const CorpusBody& cb, std::size_t i) {
        const Body d = enclosing_ellipsoid(cb.body);
        const VolumeEstimate m = milman_functional(cb.body, d, options.mc_budget, instance_seed(spec, i));
        return std::vector<ExperimentRow>{make_row(cb.id, cb.descriptor, m.value, m.std_error, envelope, 0.0)};
    });
    summarize(report);
    return report;
}

ExperimentReport run_lemma3_envelope(const CorpusSpec& spec, const ExperimentOptions& options) {
    auto report = new_report("lemma3_envelope", spec, options, "max ratio");
    const int n = spec.dim;
    const double alpha = options.alpha.value_or(1.0 / spec.p - 0.5 + 0.25);
    if (!(alpha > 1.0 / spec.p - 0.5)) {
        throw InvalidBodyError(fmt::format("alpha = {} must exceed 1/p - 1/2 = {}", alpha, 1.0 / spec.p - 0.5));
    }
    const double sandwich = std::pow(static_cast<double>(n), 1.0 / spec.p - 1.0);
    const auto bodies = generate_bodies(spec);
    report.rows = evaluate<CorpusBody>(bodies, [&](const CorpusBody& cb, std::size_t i) {
        const Body d = enclosing_ellipsoid(cb.body);
        const Body inner = inscribed_ellipsoid(cb.body);
        // d_k(D -> B) <= |hull -> B| d_k(D -> D_in) since D_in is inside the hull.
        const auto spectral = kolmogorov_numbers_ellipsoid(d, inner, n);
        const LinearMap id = LinearMap::identity(n);
        const auto e = entropy_numbers(id, cb.body, d, n, options.mc_budget, instance_seed(spec, i));
        const double norm = operator_norm(id, cb.body, d);
        double best = -INFINITY;
        int kbest = 1;
        std::vector<std::pair<std::string, double>> extras;
        bool monotone = true;
        for (int k = 1; k <= n; ++k) {
            const double dk = sandwich * spectral.values[static_cast<std::size_t>(k - 1)];
            const double ek = e.values[static_cast<std::size_t>(k - 1)];
            if (k > 1 && ek > e.values[static_cast<std::size_t>(k - 2)]) monotone = false;
            extras.emplace_back(fmt::format("d{}", k), dk);
            extras.emplace_back(fmt::format("e{}", k), ek);
            const double c = (dk + ek) / std::pow(static_cast<double>(n) / k, alpha);
            if (c > best) {
                best = c;
                kbest = k;
            }
        }
        const double dk = sandwich * spectral.values[static_cast<std::size_t>(kbest - 1)];
        const double ek = e.values[static_cast<std::size_t>(kbest - 1)];
        auto row = make_row(cb.id, cb.descriptor, dk + ek, 0.0, std::pow(static_cast<double>(n) / kbest, alpha), 0.0);
        extras.emplace_back("k_star", kbest);
        extras.emplace_back("alpha", alpha);
        extras.emplace_back("operator_norm", norm);
        extras.emplace_back("entropy_monotone", monotone ? 1.0 : 0.0);
        row.extras = std::move(extras);
        return std::vector<ExperimentRow>{row};
    });
    summarize(report);
    return report;
}

ExperimentReport run_eq2_two_sided(const CorpusSpec& spec, const ExperimentOptions& options) {
    auto report = new_report("eq2_two_sided", spec, options, "max two-sided ratio");
    const int n = spec.dim;
    const long budget = options.mc_budget;
    const auto bodies = generate_bodies(spec);
    report.rows = evaluate<CorpusBody>(bodies, [&](const CorpusBody& cb, std::size_t i) {
        const std::uint64_t seed = instance_seed(spec, i);
        const VolumeEstimate vb = volume(cb.body, budget, derive_seed(seed, 1));
        const Body enclosing = enclosing_ellipsoid(cb.body);
        const double vd = volume(enclosing).value;
        const double t = std::pow(vb.value / vd, 1.0 / n);
        const Body d = t == 1.0 ? enclosing : scaled(enclosing, t);
        std::vector<ExperimentRow> rows;
        const auto base = volume_radius(vb, n);
        {
            // |D| = |B| by construction.
            auto row = make_row(cb.id + "/zero", cb.descriptor + "; probe {0}", base.value, base.std_error,
                                std::pow(vd * std::pow(t, n), 1.0 / n), 0.0);
            rows.push_back(row);
        }
        const std::vector<std::pair<std::string, Body>> probes{{"box", Body::box(Vector::Ones(n))},
                                                                {"ball", Body::euclidean_ball(n)}};
        // Both sides share a seed (common random numbers), so B = D gives ratio 1 exactly.
        std::uint64_t stream = 10;
        for (const auto& [name, probe] : probes) {
            const std::uint64_t s = derive_seed(seed, stream++);
            const auto lhs = volume_radius(volume_sum(cb.body, probe, budget, s), n);
            const auto rhs = volume_radius(volume_sum(d, probe, budget, s), n);
            rows.push_back(make_row(cb.id + "/" + name, cb.descriptor + "; probe " + probe.describe(), lhs.value,
                                    lhs.std_error, rhs.value, rhs.std_error));
        }
        Vector half = Vector::Zero(n);
        half(0) = 1.0;
        const std::uint64_t s = derive_seed(seed, stream);
        const auto lhs = volume_radius(volume_sum_segment(cb.body, half, budget, s), n);
        const auto rhs = volume_radius(volume_sum_segment(d, half, budget, s), n);
        rows.push_back(make_row(cb.id + "/segment", cb.descriptor + "; probe segment [-e1, e1]", lhs.value,
                                lhs.std_error, rhs.value, rhs.std_error));
        return rows;
    });
    summarize(report);
    return report;
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"brunn_minkowski", "reverse_bm",      "santalo",      "prop1",
                                                "prop2",           "lemma3_envelope", "eq2_two_sided"};
    return names;
}

ExperimentReport run_experiment(const std::string& name, const CorpusSpec& spec, const ExperimentOptions& options) {
    static const std::map<std::string, ExperimentReport (*)(const CorpusSpec&, const ExperimentOptions&)> table{
        {"brunn_minkowski", &run_brunn_minkowski}, {"reverse_bm", &run_reverse_bm},
        {"santalo", &run_santalo},                 {"prop1", &run_prop1},
        {"prop2", &run_prop2},                     {"lemma3_envelope", &run_lemma3_envelope},
        {"eq2_two_sided", &run_eq2_two_sided},
    };
    const auto it = table.find(name);
    if (it == table.end()) throw InvalidBodyError(fmt::format("unknown experiment '{}'", name));
    return it->second(spec, options);
}

}  // namespace pcg
