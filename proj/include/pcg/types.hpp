#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pcg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Module-wide limits.
inline constexpr int kMaxDimension = 6;
inline constexpr int kMaxCoveringDimension = 4;
inline constexpr int kMaxExperimentDimension = 4;
inline constexpr int kMaxGenerators = 64;
inline constexpr long kLatticeCandidateCap = 1'000'000;

/// Comparison tolerances shared by every module.
struct Tolerances {
    double exact_relative = 1e-9;   // exact-gauge comparisons
    double oracle = 1e-6;           // comparisons against search/oracle results
    double shape_symmetry = 1e-12;  // ellipsoid shape matrix symmetry
    double determinant_relative = 1e-10;
    double sum_membership = 1e-6;   // slack on min gauge in Minkowski-sum membership
};
inline constexpr Tolerances kTolerance{};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mismatched ambient dimensions between arguments.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Input violates a domain invariant (non-spanning generators, singular map, ...).
class InvalidBodyError : public Error {
public:
    using Error::Error;
};

/// Operation is not defined for the given body variant.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// A configured resource cap (lattice size, sample budget) was exceeded.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// An iterative solver failed to reach its stopping criterion.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Three-valued membership answer; indeterminate only arises from search-based oracles.
enum class Membership { outside, inside, indeterminate };

}  // namespace pcg
