#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "hullconc/common.hpp"

namespace hullconc::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
    Status status = Status::Infeasible;
    double objective = 0.0;
    Vector x;  // original variables; valid when status == Optimal
};

namespace detail {

inline void pivot(Matrix& T, std::vector<int>& basis, int row, int col) {
    T.row(row) /= T(row, col);
    for (Eigen::Index i = 0; i < T.rows(); ++i) {
        if (i == row) continue;
        const double f = T(i, col);
        if (f != 0.0) T.row(i) -= f * T.row(row);
    }
    basis[static_cast<std::size_t>(row)] = col;
}

/// Revised-tableau simplex over columns [0, ncols). Dantzig pricing with a
/// permanent switch to Bland's rule once the objective stalls, so degenerate
/// instances cannot cycle. Returns the status; the tableau/basis are left at
/// the final iterate.
inline Status optimize(Matrix& T, std::vector<int>& basis, const Vector& cost, int ncols) {
    const int m = static_cast<int>(T.rows());
    const int rhs = static_cast<int>(T.cols()) - 1;
    const double tol = 1e-9;
    const long limit = 4000 + 50L * ncols;
    bool bland = false;
    int stall = 0;
    double prev_obj = kInf;

    Vector y(m);
    for (long it = 0; it < limit; ++it) {
        for (int i = 0; i < m; ++i) y[i] = cost[basis[static_cast<std::size_t>(i)]];
        int enter = -1;
        double best_r = -tol;
        for (int j = 0; j < ncols; ++j) {
            const double r = cost[j] - y.dot(T.col(j));
            if (bland) {
                if (r < -tol) {
                    enter = j;
                    break;
                }
            } else if (r < best_r) {
                best_r = r;
                enter = j;
            }
        }
        if (enter < 0) return Status::Optimal;

        int leave = -1;
        double best_ratio = kInf;
        for (int i = 0; i < m; ++i) {
            const double a = T(i, enter);
            if (a <= tol) continue;
            const double ratio = T(i, rhs) / a;
            if (ratio < best_ratio - 1e-12 ||
                (ratio < best_ratio + 1e-12 &&
                 (leave < 0 || basis[static_cast<std::size_t>(i)] <
                               basis[static_cast<std::size_t>(leave)]))) {
                best_ratio = ratio;
                leave = i;
            }
        }
        if (leave < 0) return Status::Unbounded;
        pivot(T, basis, leave, enter);

        double obj = 0.0;
        for (int i = 0; i < m; ++i)
            obj += cost[basis[static_cast<std::size_t>(i)]] * T(i, rhs);
        if (obj >= prev_obj - 1e-12) {
            if (++stall > 40) bland = true;
        } else {
            stall = 0;
        }
        prev_obj = obj;
    }
    throw std::runtime_error("simplex: iteration limit exceeded");
}

}  // namespace detail

/// min c'x  subject to  A x = b, x >= 0,  by two-phase dense simplex.
inline Result solve(Matrix A, Vector b, const Vector& c) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    if (b.size() != m || c.size() != n) throw std::invalid_argument("lp::solve: shape mismatch");
    for (int i = 0; i < m; ++i) {
        if (b[i] < 0.0) {
            A.row(i) = -A.row(i);
            b[i] = -b[i];
        }
    }

    Matrix T(m, n + m + 1);
    T.leftCols(n) = A;
    T.middleCols(n, m) = Matrix::Identity(m, m);
    T.col(n + m) = b;
    std::vector<int> basis(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

    Vector phase1_cost = Vector::Zero(n + m);
    phase1_cost.tail(m).setOnes();
    if (detail::optimize(T, basis, phase1_cost, n + m) != Status::Optimal)
        throw std::runtime_error("simplex: phase 1 unbounded");

    double artificial_mass = 0.0;
    for (int i = 0; i < m; ++i)
        if (basis[static_cast<std::size_t>(i)] >= n) artificial_mass += T(i, n + m);
    Result res;
    if (artificial_mass > 1e-7 * (1.0 + b.cwiseAbs().maxCoeff())) {
        res.status = Status::Infeasible;
        return res;
    }
    // Drive zero-level artificials out where a real pivot exists; a row with
    // none is redundant and its artificial stays basic at level zero
    // (harmless: artificial columns are not scanned in phase 2).
    for (int i = 0; i < m; ++i) {
        if (basis[static_cast<std::size_t>(i)] < n) continue;
        for (int j = 0; j < n; ++j) {
            if (std::fabs(T(i, j)) > 1e-9) {
                detail::pivot(T, basis, i, j);
                break;
            }
        }
    }

    Vector phase2_cost = Vector::Zero(n + m);
    phase2_cost.head(n) = c;
    const Status st = detail::optimize(T, basis, phase2_cost, n);
    if (st == Status::Unbounded) {
        res.status = Status::Unbounded;
        return res;
    }
    res.status = Status::Optimal;
    res.x = Vector::Zero(n);
    for (int i = 0; i < m; ++i)
        if (basis[static_cast<std::size_t>(i)] < n)
            res.x[basis[static_cast<std::size_t>(i)]] = T(i, n + m);
    res.objective = c.dot(res.x);
    return res;
}

}  // namespace hullconc::lp
