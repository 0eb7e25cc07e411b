#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hullconc/quadrature.hpp"
#include "hullconc/scalar_law.hpp"

namespace hullconc {

/// log J(x)^n, computed from whichever of J or the survival function keeps
/// precision near its end of the range.
inline double log_max_law_cdf(const ScalarLaw& law, std::int64_t n, double x) {
    const double J = law.cdf(x);
    if (J <= 0.0) return -std::numeric_limits<double>::infinity();
    const double logJ = J < 0.5 ? std::log(J) : std::log1p(-law.sf(x));
    return static_cast<double>(n) * logJ;
}

/// CDF of the maximum of n independent draws: J(x)^n.
inline double max_law_cdf(const ScalarLaw& law, std::int64_t n, double x) {
    if (n < 1) throw std::domain_error("max_law_cdf: n must be >= 1");
    return std::exp(log_max_law_cdf(law, n, x));
}

/// J^-1(t) with domain check; the inverse is exact where J has flat spots
/// (returns the left end of the level set, per the generalized inverse).
inline double generalized_inverse(const ScalarLaw& law, double t) {
    return law.quantile(t);
}

/// Law of max{Y_1..Y_n}: thin view over the base law.
struct MaxLaw {
    ScalarLaw base;
    std::int64_t n;

    double cdf(double x) const { return max_law_cdf(base, n, x); }
    double density(double x) const {
        const double logJ = log_max_law_cdf(base, n - 1, x);
        return std::exp(logJ) * static_cast<double>(n) * base.density(x);
    }
    /// J_n^-1(p) = J^-1(p^{1/n}), addressed through the upper tail so the
    /// 1/n-th root keeps precision for p near 1.
    double quantile(double p) const {
        if (!(p > 0.0 && p < 1.0)) throw std::domain_error("MaxLaw::quantile: p outside (0,1)");
        const double tail = -std::expm1(std::log(p) / static_cast<double>(n));
        if (tail <= 0.0) return base.upper();
        return base.upper_quantile(tail);
    }
};

namespace detail {

/// Breakpoints for integrating 1 - J^n over [0, inf): upper quantiles at
/// tail masses c/n place panel edges across the boundary layer where the
/// integrand falls from 1 to 0.
inline std::vector<double> right_breaks(const ScalarLaw& law, std::int64_t n) {
    static const double kTailScales[] = {3e2, 1e2, 3e1, 1e1, 3.0, 1.0,
                                         3e-1, 1e-1, 1e-2, 1e-4, 1e-7, 1e-10, 1e-14};
    std::vector<double> bs{0.0};
    const double nn = static_cast<double>(n);
    for (double c : kTailScales) {
        const double tail = std::min(0.5, c / nn);
        const double x = law.upper_quantile(tail);
        if (x > bs.back() * (1.0 + 1e-12) && x > bs.back() + 1e-300) bs.push_back(x);
    }
    if (bs.size() == 1) bs.push_back(law.upper_quantile(std::min(0.5, 1e-14 / nn)));
    return bs;
}

/// Breakpoints for integrating J^n over (-inf, 0]: quantiles at levels
/// where J^n crosses fixed magnitudes.
inline std::vector<double> left_breaks(const ScalarLaw& law, std::int64_t n) {
    static const double kLevels[] = {1e-14, 1e-10, 1e-7, 1e-4, 1e-2, 0.1, 0.3, 0.6, 0.9};
    const double lo = law.lower();
    double a = std::isfinite(lo) ? lo : law.quantile(1e-14);
    std::vector<double> bs{a};
    const double nn = static_cast<double>(n);
    for (double level : kLevels) {
        const double t = std::exp(std::log(level) / nn);
        if (t <= 0.0 || t >= 1.0) continue;
        const double x = law.quantile(t);
        if (x >= 0.0) break;
        if (x > bs.back() * (1.0 + 1e-12) && x > bs.back() + 1e-300) bs.push_back(x);
    }
    bs.push_back(0.0);
    return bs;
}

}  // namespace detail

/// E max{Y_1..Y_n} by the tail-probability identity
///   E Y_(n) = int_0^inf (1 - J^n) dx - int_-inf^0 J^n dx,
/// each piece integrated adaptively with panel edges pinned to the
/// boundary layer. Absolute accuracy ~1e-9 for the catalog laws.
inline double expected_max(const ScalarLaw& law, std::int64_t n) {
    if (n < 1) throw std::domain_error("expected_max: n must be >= 1");
    const double tol = 1e-9;

    double right = 0.0;
    {
        auto bs = detail::right_breaks(law, n);
        right = quadrature::integrate_segmented(
            [&](double x) { return -std::expm1(log_max_law_cdf(law, n, x)); }, bs, 0.5 * tol);
    }
    double left = 0.0;
    {
        auto bs = detail::left_breaks(law, n);
        if (bs.back() > bs.front()) {
            left = quadrature::integrate_segmented(
                [&](double x) { return std::exp(log_max_law_cdf(law, n, x)); }, bs, 0.5 * tol);
        }
    }
    return right - left;
}

/// Two-sided concentration check for the sample maximum at a fixed
/// deviation t: the distribution function evaluated at (1 +- t) E Y_(n)
/// against the closed-form bounds
///   P{Y_(n) <= (1+t) E}  >=  1 - n^{-t/2}
///   P{Y_(n) >= (1-t) E}  >=  1 - exp(-n^{t/2} / 3)
/// valid for n >= 12 and centered base laws with E Y_(n) > 0.
/// `bound_left_sharp` records the exp(-9 n^{t/2} / 20) variant that the
/// derivation actually yields before rounding constants.
struct Lemma4Report {
    std::int64_t n = 0;
    double t = 0.0;
    double e_max = 0.0;
    double p_right = 0.0;      // P{Y_(n) <= (1+t) E}
    double bound_right = 0.0;  // 1 - n^{-t/2}
    double p_left = 0.0;       // P{Y_(n) >= (1-t) E}
    double bound_left = 0.0;   // 1 - exp(-n^{t/2}/3)
    double bound_left_sharp = 0.0;
    bool holds_right = false;
    bool holds_left = false;
};

inline Lemma4Report lemma4_verify(const ScalarLaw& law, std::int64_t n, double t) {
    if (n < 12) throw std::domain_error("lemma4_verify: n must be >= 12");
    if (!(t > 0.0)) throw std::domain_error("lemma4_verify: t must be > 0");
    Lemma4Report r;
    r.n = n;
    r.t = t;
    r.e_max = expected_max(law, n);
    if (!(r.e_max > 0.0))
        throw std::domain_error("lemma4_verify: requires E max > 0 (is the law centered?)");

    const double logn = std::log(static_cast<double>(n));
    r.p_right = max_law_cdf(law, n, (1.0 + t) * r.e_max);
    r.bound_right = -std::expm1(-0.5 * t * logn);  // 1 - n^{-t/2}

    r.p_left = -std::expm1(log_max_law_cdf(law, n, (1.0 - t) * r.e_max));
    const double nt2 = std::exp(0.5 * t * logn);  // n^{t/2}
    r.bound_left = -std::expm1(-nt2 / 3.0);
    r.bound_left_sharp = -std::expm1(-0.45 * nt2);

    const double kTol = 1e-8;  // quadrature + CDF evaluation slack
    r.holds_right = r.p_right >= r.bound_right - kTol;
    r.holds_left = r.p_left >= r.bound_left - kTol;
    return r;
}

/// Quantile sandwich for the expected maximum:
///   J_n^-1(1/e)  <=  E Y_(n)  <=  J_n^-1(1 - 1/e),
/// plus the two auxiliary comparisons that drive it,
///   J^-1(1/n)-tail form:  q(1 - 1/n)       <= E Y_(n)   (n >= 2)
///   q(1 - 9/(20n))        >  E Y_(n)        (n >= 12).
struct SandwichCheck {
    std::int64_t n = 0;
    double e_max = 0.0;
    double q_lower = 0.0;  // J_n^-1(e^-1)
    double q_upper = 0.0;  // J_n^-1(1 - e^-1)
    double aux_lower = 0.0;
    double aux_upper = 0.0;
    bool lower_holds = false;
    bool upper_holds = false;
    bool aux_lower_holds = false;
    bool aux_upper_holds = false;
};

inline SandwichCheck quantile_sandwich_check(const ScalarLaw& law, std::int64_t n) {
    if (n < 1) throw std::domain_error("quantile_sandwich_check: n must be >= 1");
    SandwichCheck s;
    s.n = n;
    s.e_max = expected_max(law, n);
    const MaxLaw mx{law, n};
    s.q_lower = mx.quantile(std::exp(-1.0));
    s.q_upper = mx.quantile(1.0 - std::exp(-1.0));
    s.aux_lower = n >= 2 ? law.upper_quantile(1.0 / static_cast<double>(n))
                         : -std::numeric_limits<double>::infinity();
    s.aux_upper = law.upper_quantile(9.0 / (20.0 * static_cast<double>(n)));

    const double kTol = 1e-8;
    s.lower_holds = s.q_lower <= s.e_max + kTol;
    s.upper_holds = s.e_max <= s.q_upper + kTol;
    s.aux_lower_holds = s.aux_lower <= s.e_max + kTol;
    s.aux_upper_holds = s.e_max < s.aux_upper + kTol;
    return s;
}

}  // namespace hullconc
