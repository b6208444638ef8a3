#include "pcg/lp.hpp"

#include <cmath>
#include <vector>

namespace pcg {

namespace {

constexpr double kPivotTol = 1e-11;

struct Tableau {
    Matrix t;  // rows 0..m-1 constraints, row m objective (reduced costs); last column rhs
    std::vector<int> basis;
    int m;
    int cols;  // variable columns

    double& rhs(int r) { return t(r, cols); }

    void pivot(int r, int c) {
        t.row(r) /= t(r, c);
        for (int i = 0; i <= m; ++i) {
            if (i != r && t(i, c) != 0.0) t.row(i) -= t(i, c) * t.row(r);
        }
        basis[r] = c;
    }

    /// Runs simplex on the objective row restricted to columns < limit. Returns false if unbounded.
    bool optimize(int limit) {
        for (int iter = 0; iter < 50000; ++iter) {
            int enter = -1;
            for (int j = 0; j < limit; ++j) {
                if (t(m, j) < -kPivotTol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;
            int leave = -1;
            double best = 0.0;
            for (int i = 0; i < m; ++i) {
                if (t(i, enter) > kPivotTol) {
                    const double ratio = rhs(i) / t(i, enter);
                    if (leave < 0 || ratio < best - 1e-14 || (std::abs(ratio - best) <= 1e-14 && basis[i] < basis[leave])) {
                        leave = i;
                        best = ratio;
                    }
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
        throw ConvergenceError("solve_standard_lp: iteration limit reached");
    }
};

}  // namespace

LpResult solve_standard_lp(const Matrix& a, const Vector& b, const Vector& c) {
    const int m = static_cast<int>(a.rows());
    const int nv = static_cast<int>(a.cols());
    if (b.size() != m || c.size() != nv) throw DimensionError("solve_standard_lp: inconsistent sizes");

    Tableau tab;
    tab.m = m;
    tab.cols = nv + m;
    tab.t = Matrix::Zero(m + 1, nv + m + 1);
    tab.basis.resize(m);
    for (int i = 0; i < m; ++i) {
        const double sign = b(i) < 0 ? -1.0 : 1.0;
        tab.t.row(i).head(nv) = sign * a.row(i);
        tab.t(i, nv + i) = 1.0;
        tab.t(i, nv + m) = sign * b(i);
        tab.basis[i] = nv + i;
    }
    // Phase 1 objective: sum of artificials, expressed in nonbasic terms.
    for (int i = 0; i < m; ++i) tab.t.row(m) -= tab.t.row(i);
    for (int i = 0; i < m; ++i) tab.t(m, nv + i) = 0.0;
    tab.optimize(nv + m);

    LpResult out;
    const double scale = 1.0 + b.cwiseAbs().maxCoeff();
    if (-tab.t(m, nv + m) > 1e-9 * scale) {
        out.status = LpStatus::infeasible;
        return out;
    }
    // Drive remaining artificials out of the basis.
    for (int i = 0; i < m; ++i) {
        if (tab.basis[i] < nv) continue;
        for (int j = 0; j < nv; ++j) {
            if (std::abs(tab.t(i, j)) > 1e-9) {
                tab.pivot(i, j);
                break;
            }
        }
    }
    // Phase 2 objective.
    tab.t.row(m).setZero();
    tab.t.row(m).head(nv) = c.transpose();
    for (int i = 0; i < m; ++i) {
        const int bj = tab.basis[i];
        if (bj < nv && c(bj) != 0.0) tab.t.row(m) -= c(bj) * tab.t.row(i);
    }
    // Artificial columns are excluded from entering in phase 2.
    if (!tab.optimize(nv)) {
        out.status = LpStatus::unbounded;
        return out;
    }
    out.status = LpStatus::optimal;
    out.x = Vector::Zero(nv);
    for (int i = 0; i < m; ++i) {
        if (tab.basis[i] < nv) out.x(tab.basis[i]) = std::max(0.0, tab.rhs(i));
    }
    out.value = c.dot(out.x);
    return out;
}

}  // namespace pcg
