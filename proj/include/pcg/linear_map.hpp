#pragma once

#include "pcg/types.hpp"

namespace pcg {

/// Invertible n x n linear map with cached determinant and inverse.
class LinearMap {
public:
    /// Throws InvalidBodyError when the matrix is not square or is singular.
    explicit LinearMap(Matrix matrix);

    static LinearMap identity(int n);
    static LinearMap scaling(int n, double factor);
    static LinearMap diagonal(const Vector& entries);

    int dim() const { return static_cast<int>(matrix_.rows()); }
    const Matrix& matrix() const { return matrix_; }
    const Matrix& inverse_matrix() const { return inverse_; }
    double det() const { return det_; }

    Vector apply(const Vector& x) const { return matrix_ * x; }
    Vector apply_inverse(const Vector& y) const { return inverse_ * y; }

    /// this ∘ inner
    LinearMap compose(const LinearMap& inner) const;
    LinearMap inverse() const;
    /// The map y -> M^{-T} y, which carries polars: (M B)° = M^{-T} B°.
    LinearMap inverse_transpose() const;
    /// Rescaled copy with |det| = 1.
    LinearMap unimodular() const;

    /// True when all off-diagonal entries vanish relative to the largest entry.
    bool is_diagonal(double rel_tol = 1e-12) const;

private:
    LinearMap(Matrix matrix, Matrix inverse, double det);

    Matrix matrix_;
    Matrix inverse_;
    double det_ = 1.0;
};

}  // namespace pcg
