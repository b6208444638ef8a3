#pragma once

#include "pcg/linear_map.hpp"
#include "pcg/types.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace pcg {

using Rng = std::mt19937_64;

/// SplitMix64 mix of (seed, stream) into an independent seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Uniform in [0, 1) from the top 53 bits.
double uniform01(Rng& rng);
double uniform(Rng& rng, double lo, double hi);
double standard_normal(Rng& rng);
Vector gaussian_vector(Rng& rng, int n);
Vector uniform_sphere(Rng& rng, int n);

/// Haar-distributed orthogonal matrix.
Matrix random_orthogonal(Rng& rng, int n);
/// Q * diag(exp(U[-1,1])), renormalized to det 1; redrawn until cond <= cond_cap.
LinearMap random_unimodular(Rng& rng, int n, double cond_cap = 20.0);

/// Point `index` of the Halton sequence in [0,1)^dim.
Vector halton(std::uint64_t index, int dim);

/// Deterministic, roughly uniform unit directions: equally spaced angles in 2D, a
/// Fibonacci lattice in 3D, Gaussianized Halton points otherwise.
std::vector<Vector> sphere_points(int n, int count);

/// Worker count: PCG_THREADS when set, else hardware concurrency.
int thread_count();
/// Calls body(i) for every i in [0, count) on up to thread_count() workers; nested calls
/// from inside a worker run serially.
/// Exceptions from workers are rethrown (the one with the lowest index wins).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace pcg
