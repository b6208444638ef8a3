#include "pcg/linear_map.hpp"

#include <cmath>

namespace pcg {

LinearMap::LinearMap(Matrix matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
        throw InvalidBodyError("LinearMap: matrix must be square and non-empty");
    }
    if (!matrix_.allFinite()) {
        throw InvalidBodyError("LinearMap: matrix has non-finite entries");
    }
    Eigen::FullPivLU<Matrix> lu(matrix_);
    det_ = lu.determinant();
    if (!lu.isInvertible() || det_ == 0.0 || !std::isfinite(det_)) {
        throw InvalidBodyError("LinearMap: matrix is singular");
    }
    inverse_ = lu.inverse();
}

LinearMap::LinearMap(Matrix matrix, Matrix inverse, double det)
    : matrix_(std::move(matrix)), inverse_(std::move(inverse)), det_(det) {}

LinearMap LinearMap::identity(int n) {
    return LinearMap(Matrix::Identity(n, n), Matrix::Identity(n, n), 1.0);
}

LinearMap LinearMap::scaling(int n, double factor) {
    if (!(factor != 0.0) || !std::isfinite(factor)) {
        throw InvalidBodyError("LinearMap::scaling: factor must be finite and nonzero");
    }
    return LinearMap(factor * Matrix::Identity(n, n), Matrix::Identity(n, n) / factor,
                     std::pow(factor, n));
}

LinearMap LinearMap::diagonal(const Vector& entries) {
    return LinearMap(Matrix(entries.asDiagonal()));
}

LinearMap LinearMap::compose(const LinearMap& inner) const {
    if (inner.dim() != dim()) {
        throw DimensionError("LinearMap::compose: dimension mismatch");
    }
    return LinearMap(matrix_ * inner.matrix_, inner.inverse_ * inverse_, det_ * inner.det_);
}

LinearMap LinearMap::inverse() const { return LinearMap(inverse_, matrix_, 1.0 / det_); }

LinearMap LinearMap::inverse_transpose() const {
    return LinearMap(inverse_.transpose(), matrix_.transpose(), 1.0 / det_);
}

LinearMap LinearMap::unimodular() const {
    const double s = std::pow(std::abs(det_), 1.0 / dim());
    return LinearMap(matrix_ / s, inverse_ * s, det_ > 0 ? 1.0 : -1.0);
}

bool LinearMap::is_diagonal(double rel_tol) const {
    const double scale = matrix_.cwiseAbs().maxCoeff();
    for (int i = 0; i < dim(); ++i) {
        for (int j = 0; j < dim(); ++j) {
            if (i != j && std::abs(matrix_(i, j)) > rel_tol * scale) return false;
        }
    }
    return true;
}

}  // namespace pcg
