#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "hullconc/common.hpp"
#include "hullconc/lp.hpp"

namespace hullconc {

/// Convex hull of a point cloud, stored by its (possibly redundant)
/// generating points, one per row. All geometric queries reduce to exact
/// vertex arithmetic or small LPs; no facet structure is ever built.
struct Polytope {
    Matrix V;  // m x d, rows are points

    int dim() const { return static_cast<int>(V.cols()); }
    Eigen::Index count() const { return V.rows(); }
};

/// h_P(theta) = max_i <theta, v_i>. Exact: a linear functional on a hull
/// attains its maximum at a generating point.
inline double support(const Polytope& P, const Vector& theta) {
    if (theta.size() != P.V.cols())
        throw std::invalid_argument("support: direction has wrong dimension");
    return (P.V * theta).maxCoeff();
}

/// Support values for many directions at once (columns of `dirs`). The
/// vertex x direction product is evaluated in column blocks so the
/// intermediate never exceeds a few megabytes regardless of vertex count.
inline Vector support_batch(const Polytope& P, const Matrix& dirs) {
    if (dirs.rows() != P.V.cols())
        throw std::invalid_argument("support_batch: direction dimension mismatch");
    const Eigen::Index m = dirs.cols();
    const Eigen::Index block =
        std::max<Eigen::Index>(1, (Eigen::Index{1} << 19) / std::max<Eigen::Index>(1, P.V.rows()));
    Vector out(m);
    for (Eigen::Index j0 = 0; j0 < m; j0 += block) {
        const Eigen::Index w = std::min(block, m - j0);
        out.segment(j0, w) = (P.V * dirs.middleCols(j0, w)).colwise().maxCoeff();
    }
    return out;
}

/// Membership x in conv(V): feasibility of sum_i b_i v_i = x, sum b = 1, b >= 0.
inline bool contains(const Polytope& P, const Vector& x) {
    const int m = static_cast<int>(P.V.rows());
    const int d = P.dim();
    Matrix A(d + 1, m);
    A.topRows(d) = P.V.transpose();
    A.row(d).setOnes();
    Vector b(d + 1);
    b.head(d) = x;
    b[d] = 1.0;
    return lp::solve(A, b, Vector::Zero(m)).status == lp::Status::Optimal;
}

/// 0 in the interior of conv(V): the points affinely span R^d and 0 is a
/// strictly positive convex combination (max-t LP over b_i >= t, re-written
/// with g_i = b_i - t >= 0).
inline bool origin_in_interior(const Polytope& P) {
    const int m = static_cast<int>(P.V.rows());
    const int d = P.dim();
    if (m < d + 1) return false;

    const Vector mean = P.V.colwise().mean();
    const Matrix centered = P.V.rowwise() - mean.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> es(centered.transpose() * centered);
    if (es.eigenvalues().minCoeff() <=
        1e-20 * std::max(1.0, es.eigenvalues().maxCoeff()))
        return false;  // flat cloud: hull has empty interior

    Matrix A(d + 1, m + 1);
    A.topLeftCorner(d, m) = P.V.transpose();
    A.topRightCorner(d, 1) = P.V.colwise().sum().transpose();
    A.row(d).head(m).setOnes();
    A(d, m) = static_cast<double>(m);
    Vector b = Vector::Zero(d + 1);
    b[d] = 1.0;
    Vector c = Vector::Zero(m + 1);
    c[m] = -1.0;  // maximize t
    const auto res = lp::solve(A, b, c);
    return res.status == lp::Status::Optimal && -res.objective > 1e-12;
}

namespace detail {

inline double gauge_lp_unchecked(const Polytope& P, const Vector& x) {
    const int m = static_cast<int>(P.V.rows());
    const auto res = lp::solve(P.V.transpose(), x, Vector::Ones(m));
    if (res.status == lp::Status::Infeasible) return kInf;  // x outside cone(V)
    if (res.status != lp::Status::Optimal)
        throw std::runtime_error("gauge_lp: unexpected LP status");
    return std::max(0.0, res.objective);
}

}  // namespace detail

/// Minkowski functional of conv(V) at x: min sum b_i over sum b_i v_i = x,
/// b >= 0. Valid because lambda P = {sum b_i v_i : b >= 0, sum b_i = lambda}.
/// Requires 0 in the interior (checked; otherwise the value would not be a
/// gauge).
inline double gauge_lp(const Polytope& P, const Vector& x) {
    if (x.size() != P.V.cols())
        throw std::invalid_argument("gauge_lp: point has wrong dimension");
    if (!origin_in_interior(P))
        throw std::invalid_argument("gauge_lp: 0 not in the interior of the polytope");
    return detail::gauge_lp_unchecked(P, x);
}

/// Max pairwise distance of generating points (exact diameter of the hull).
inline double diameter(const Polytope& P) {
    const Eigen::Index m = P.V.rows();
    if (m < 2) throw std::invalid_argument("diameter: need >= 2 points");
    double best = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i + 1; j < m; ++j)
            best = std::max(best, (P.V.row(i) - P.V.row(j)).norm());
    return best;
}

/// Hausdorff bound for bodies sandwiched as lambda^{-1} A subseteq B
/// subseteq lambda A about a common center: d_H(A,B) <= diam(B) (lambda-1).
/// (lambda = 1 must give 0, which pins the deviation-from-one form.)
inline double hausdorff_transfer(double lambda, double diam_b) {
    if (!(lambda >= 1.0)) throw std::domain_error("hausdorff_transfer: lambda must be >= 1");
    if (!(diam_b > 0.0)) throw std::domain_error("hausdorff_transfer: diameter must be positive");
    return diam_b * (lambda - 1.0);
}

struct PolarCheck {
    double support_value = 0.0;  // h_P(theta) by vertex maximum
    double polar_gauge = 0.0;    // |theta| w.r.t. P-polar, by membership bisection
    bool equal = false;
};

/// Checks h_P(theta) = gauge of theta w.r.t. the polar body
/// P-polar = {y : <v,y> <= 1 for all vertices v}. The right-hand side is
/// evaluated from the polar's membership oracle alone (bisection on
/// theta/lambda in P-polar), so the two sides follow different routes.
inline PolarCheck polar_gauge_identity_check(const Polytope& P, const Vector& theta,
                                             double tol = 1e-10) {
    PolarCheck chk;
    chk.support_value = support(P, theta);
    const Vector vt = P.V * theta;
    auto in_polar_scaled = [&](double lambda) {  // theta/lambda in P-polar
        return (vt.array() <= lambda * (1.0 + 1e-15)).all();
    };
    if (chk.support_value <= 0.0) {
        // Gauge of a direction that never sees the body positively is 0.
        chk.polar_gauge = 0.0;
    } else {
        double hi = 1.0;
        while (!in_polar_scaled(hi)) hi *= 2.0;
        double lo = 0.0;
        for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            (in_polar_scaled(mid) ? hi : lo) = mid;
        }
        chk.polar_gauge = hi;
    }
    chk.equal = std::fabs(chk.polar_gauge - chk.support_value) <=
                tol * (1.0 + std::fabs(chk.support_value));
    return chk;
}

}  // namespace hullconc
