#pragma once

#include <cmath>
#include <stdexcept>

namespace hullconc {

inline constexpr double kSqrt2 = 1.4142135623730951;
inline constexpr double kSqrt2Pi = 2.5066282746310002;

/// Standard normal CDF via erfc; accurate in both tails.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

/// Standard normal survival function 1 - Phi(x), accurate for large x.
inline double normal_sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

namespace detail {

// Acklam's rational approximation to Phi^-1, ~1.15e-9 relative error.
inline double acklam_ppf(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00, 2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

/// Standard normal quantile from the lower tail mass, refined with Halley's
/// method to full double precision. `p` in (0,1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p outside (0,1)");
    // Work in the lower tail; the upper tail maps through symmetry so the
    // refinement always evaluates the CDF where it is well conditioned.
    if (p > 0.5) return -normal_quantile(1.0 - p);
    double x = detail::acklam_ppf(p);
    for (int i = 0; i < 3; ++i) {
        const double e = normal_cdf(x) - p;
        const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
        const double step = u / (1.0 + 0.5 * x * u);
        const double nx = x - step;
        if (nx == x) break;
        x = nx;
    }
    return x;
}

/// Quantile addressed by the upper tail mass: returns Phi^-1(1 - tail)
/// without forming 1 - tail, so tiny tails keep full precision.
inline double normal_upper_quantile(double tail) { return -normal_quantile(tail); }

/// Fast quantile (no refinement) for bulk sampling; ~1e-9 relative error.
inline double normal_quantile_fast(double p) { return detail::acklam_ppf(p); }

}  // namespace hullconc
