#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hullconc/common.hpp"
#include "hullconc/normal.hpp"
#include "hullconc/polytope.hpp"
#include "hullconc/rng.hpp"

namespace hullconc {

/// Minkowski functional of a fixed convex body K with 0 interior.
/// Positively homogeneous and sublinear, but in general NOT symmetric:
/// eval(z - w) and eval(w - z) may differ, and all covering logic below
/// measures probe-minus-netpoint in that order.
struct GaugeOracle {
    std::function<double(const Vector&)> eval;
    int dim = 0;
    std::string label;

    double operator()(const Vector& z) const { return eval(z); }

    static GaugeOracle from_polytope(Polytope P, std::string label = "polytope") {
        if (!origin_in_interior(P))
            throw std::invalid_argument("GaugeOracle: 0 not interior to the polytope");
        const int d = P.dim();
        auto body = std::make_shared<Polytope>(std::move(P));
        return GaugeOracle{
            [body](const Vector& z) { return detail::gauge_lp_unchecked(*body, z); }, d,
            std::move(label)};
    }

    /// Gauge of the polar of a body given by its support function h:
    /// |z| w.r.t. B-polar equals h_B(z). The zero vector has gauge 0 even
    /// when the support oracle itself rejects zero directions.
    static GaugeOracle from_support(std::function<double(const Vector&)> h, int dim,
                                    std::string label = "polar") {
        auto guarded = [h = std::move(h)](const Vector& z) {
            return z.norm() == 0.0 ? 0.0 : h(z);
        };
        return GaugeOracle{std::move(guarded), dim, std::move(label)};
    }
};

inline double net_cardinality_bound(double epsilon, int dim) {
    return std::pow(3.0 / epsilon, dim);
}

/// Boundary epsilon-net: points on the unit sphere of the gauge such that
/// every boundary point z has some net point w with eval(z - w) <= epsilon.
struct Net {
    GaugeOracle body;
    double epsilon = 0.0;
    std::vector<Vector> points;

    std::size_t size() const { return points.size(); }

    /// Distance (in the body gauge, probe-minus-netpoint order) from z to
    /// the nearest net point, and that point's index.
    std::pair<double, std::size_t> nearest(const Vector& z) const {
        double best = kInf;
        std::size_t arg = 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double g = body(z - points[i]);
            if (g < best) {
                best = g;
                arg = i;
            }
        }
        return {best, arg};
    }
};

/// Randomized-greedy net construction. Streams random directions projected
/// to the boundary (z = u / eval(u)); keeps a candidate iff no kept point
/// already covers it; stops after `candidate_budget` consecutive covered
/// candidates. The kept set is pairwise separated (later minus earlier
/// gauge > epsilon), and the cardinality is asserted against the
/// volumetric ceiling (3/epsilon)^d: exceeding it means the gauge is not
/// the gauge of a convex body.
inline Net build_net(const GaugeOracle& body, double epsilon, int dim,
                     long candidate_budget = 20000, std::uint64_t seed = 1) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("build_net: epsilon must lie in (0, 1)");
    if (dim < 1 || dim != body.dim) throw std::invalid_argument("build_net: dimension mismatch");
    if (candidate_budget < 1) throw std::invalid_argument("build_net: budget must be positive");

    const double bound = net_cardinality_bound(epsilon, dim);
    Net net{body, epsilon, {}};
    Rng rng(seed);
    Vector u(dim), z(dim);
    long consecutive_covered = 0;
    while (consecutive_covered < candidate_budget) {
        for (int i = 0; i < dim; ++i) u[i] = normal_quantile_fast(rng.next_open01());
        if (u.norm() <= 1e-6) continue;  // degenerate candidate, resample
        const double g = body(u);
        if (!(g > 1e-12))
            throw std::runtime_error("build_net: gauge not positive on a nonzero vector");
        z = u / g;
        bool covered = false;
        for (const Vector& w : net.points) {
            if (body(z - w) <= epsilon) {
                covered = true;
                break;
            }
        }
        if (covered) {
            ++consecutive_covered;
            continue;
        }
        consecutive_covered = 0;
        net.points.push_back(z);
        if (static_cast<double>(net.points.size()) > bound)
            throw std::logic_error(
                "build_net: cardinality exceeded (3/epsilon)^d; gauge is not convex-body-like");
    }
    return net;
}

/// theta = w_0 + sum_i eps_i w_i with net points w_i and coefficients
/// eps_i <= epsilon^i; `residuals[k]` is the gauge of theta minus the
/// first k+1 terms, so the final residual is <= epsilon^{terms+1}.
struct Decomposition {
    Vector base;                                   // w_0
    std::vector<std::pair<double, Vector>> terms;  // (eps_i, w_i), i >= 1
    std::vector<double> residuals;                 // residual gauge after each selection

    Vector reconstruct() const {
        Vector x = base;
        for (const auto& [c, w] : terms) x += c * w;
        return x;
    }
    double final_residual() const { return residuals.empty() ? 0.0 : residuals.back(); }
};

/// Greedy residual decomposition from the covering property: at each step
/// the residual direction is a boundary point, so some net point is within
/// epsilon of it; subtracting that point scaled by the residual gauge
/// shrinks the gauge by a factor epsilon per step.
inline Decomposition decompose(const Vector& theta, const Net& net, int max_terms = 64) {
    if (net.points.empty()) throw std::invalid_argument("decompose: empty net");
    const double t0 = net.body(theta);
    if (std::fabs(t0 - 1.0) > 1e-9)
        throw std::invalid_argument("decompose: theta is not on the body boundary");
    if (max_terms < 0) throw std::invalid_argument("decompose: max_terms must be >= 0");

    auto fail_uncovered = [&](const Vector& dir, double dist) {
        std::ostringstream os;
        os << "decompose: net covering violated at boundary direction (";
        for (Eigen::Index i = 0; i < dir.size(); ++i) os << (i ? "," : "") << dir[i];
        os << "), nearest gauge distance " << dist << " > epsilon " << net.epsilon;
        throw std::runtime_error(os.str());
    };

    Decomposition dec;
    Vector residual = theta;
    double res_gauge = 1.0;  // gauge of residual; theta is on the boundary
    // Base selection is the k = 0 instance of the same covering step.
    for (int k = 0; k <= max_terms; ++k) {
        const Vector z = residual / res_gauge;  // boundary direction of the residual
        const auto [dist, idx] = net.nearest(z);
        if (dist > net.epsilon * (1.0 + 1e-9) + 1e-15) fail_uncovered(z, dist);
        if (k == 0) {
            dec.base = net.points[idx];
            residual = theta - dec.base;
        } else {
            dec.terms.emplace_back(res_gauge, net.points[idx]);
            residual -= res_gauge * net.points[idx];
        }
        // residual = prev_residual - prev_gauge * w, so its gauge is
        // prev_gauge * dist <= prev_gauge * epsilon <= epsilon^{k+1}.
        res_gauge = net.body(residual);
        dec.residuals.push_back(res_gauge);
        if (res_gauge <= 1e-14) break;
    }
    return dec;
}

}  // namespace hullconc
