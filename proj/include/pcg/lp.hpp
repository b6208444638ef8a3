#pragma once

#include "pcg/types.hpp"

namespace pcg {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Vector x;
    double value = 0.0;
};

/// minimize c^T x subject to A x = b, x >= 0. Dense two-phase simplex with Bland's rule.
LpResult solve_standard_lp(const Matrix& a, const Vector& b, const Vector& c);

}  // namespace pcg
