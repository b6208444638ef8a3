#include "pcg/random.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pcg {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream) { return Rng(derive_seed(seed, stream)); }

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

double standard_normal(Rng& rng) {
    // Box-Muller keeps streams identical across standard libraries.
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Vector gaussian_vector(Rng& rng, int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = standard_normal(rng);
    return v;
}

Vector uniform_sphere(Rng& rng, int n) {
    while (true) {
        Vector v = gaussian_vector(rng, n);
        const double r = v.norm();
        if (r > 1e-12) return v / r;
    }
}

Matrix random_orthogonal(Rng& rng, int n) {
    Matrix g(n, n);
    for (int i = 0; i < n; ++i) g.col(i) = gaussian_vector(rng, n);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
        if (r(i, i) < 0) q.col(i) = -q.col(i);
    }
    return q;
}

LinearMap random_unimodular(Rng& rng, int n, double cond_cap) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Matrix q = random_orthogonal(rng, n);
        Vector d(n);
        for (int i = 0; i < n; ++i) d(i) = std::exp(uniform(rng, -1.0, 1.0));
        if (d.maxCoeff() / d.minCoeff() > cond_cap) continue;
        d /= std::pow(d.prod(), 1.0 / n);
        return LinearMap(q * d.asDiagonal());
    }
    throw ConvergenceError("random_unimodular: condition cap too tight");
}

Vector halton(std::uint64_t index, int dim) {
    static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    if (dim > static_cast<int>(std::size(kPrimes))) throw DimensionError("halton: dimension too large");
    Vector v(dim);
    for (int d = 0; d < dim; ++d) {
        const std::uint64_t base = kPrimes[d];
        double f = 1.0;
        double r = 0.0;
        std::uint64_t i = index + 1;
        while (i > 0) {
            f /= static_cast<double>(base);
            r += f * static_cast<double>(i % base);
            i /= base;
        }
        v(d) = r;
    }
    return v;
}

std::vector<Vector> sphere_points(int n, int count) {
    std::vector<Vector> out;
    out.reserve(count);
    if (n == 1) {
        out.push_back(Vector::Constant(1, 1.0));
        out.push_back(Vector::Constant(1, -1.0));
        return out;
    }
    if (n == 2) {
        for (int k = 0; k < count; ++k) {
            const double t = 2.0 * M_PI * (k + 0.5) / count;
            Vector v(2);
            v << std::cos(t), std::sin(t);
            out.push_back(v);
        }
        return out;
    }
    if (n == 3) {
        const double golden = M_PI * (3.0 - std::sqrt(5.0));
        for (int k = 0; k < count; ++k) {
            const double z = 1.0 - 2.0 * (k + 0.5) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            Vector v(3);
            v << r * std::cos(golden * k), r * std::sin(golden * k), z;
            out.push_back(v);
        }
        return out;
    }
    const int pairs = (n + 1) / 2;
    for (int k = 0; k < count; ++k) {
        const Vector h = halton(static_cast<std::uint64_t>(k), 2 * pairs);
        Vector v(n);
        for (int j = 0; j < pairs; ++j) {
            const double u1 = std::max(h(2 * j), 1e-12);
            const double r = std::sqrt(-2.0 * std::log(u1));
            const double t = 2.0 * M_PI * h(2 * j + 1);
            v(2 * j) = r * std::cos(t);
            if (2 * j + 1 < n) v(2 * j + 1) = r * std::sin(t);
        }
        out.push_back(v.normalized());
    }
    return out;
}

int thread_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("PCG_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) return cap;
    }
    return hw;
}

namespace {
thread_local bool inside_worker = false;
}  // namespace

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const int workers = static_cast<int>(std::min<std::size_t>(count, static_cast<std::size_t>(thread_count())));
    if (workers <= 1 || inside_worker) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mutex;
    std::size_t failed_index = count;
    std::exception_ptr failure;
    auto run = [&] {
        inside_worker = true;
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mutex);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> threads;
    for (int t = 0; t < workers; ++t) threads.emplace_back(run);
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace pcg
