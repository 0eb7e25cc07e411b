#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace hullconc {

/// Adaptive quadrature on finite panels built on the 7/15 Gauss-Kronrod pair.
/// Globally adaptive: keeps a worklist of segments and bisects the one with
/// the largest error estimate until the total estimate meets the tolerance.
namespace quadrature {

namespace detail {

// 15-point Kronrod abscissae/weights and the embedded 7-point Gauss weights.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
};

template <typename F>
Panel gk15(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kXgk[i]);
        fv[14 - i] = f(c + h * kXgk[i]);
    }
    fv[7] = f(c);
    double kron = kWgk[7] * fv[7];
    double gauss = kWg[3] * fv[7];
    for (int i = 0; i < 7; ++i) {
        kron += kWgk[i] * (fv[i] + fv[14 - i]);
        if (i % 2 == 1) gauss += kWg[i / 2] * (fv[i] + fv[14 - i]);
    }
    kron *= h;
    gauss *= h;
    const double diff = std::fabs(kron - gauss);
    // QUADPACK-style sharpened estimate; never below roundoff level.
    double err = diff;
    if (diff > 0.0) err = std::min(diff, std::pow(200.0 * diff, 1.5));
    err = std::max(err, 1e-300);
    return {a, b, kron, err};
}

}  // namespace detail

/// Integrates f over [a,b] to absolute tolerance abs_tol.
/// Throws std::runtime_error when the segment budget is exhausted.
template <typename F>
double integrate(F&& f, double a, double b, double abs_tol, int max_panels = 4000) {
    if (a == b) return 0.0;
    std::vector<detail::Panel> panels;
    panels.push_back(detail::gk15(f, a, b));
    double total_err = panels[0].error;
    while (total_err > abs_tol) {
        if (static_cast<int>(panels.size()) >= max_panels)
            throw std::runtime_error("quadrature: panel budget exhausted (non-convergent integrand?)");
        std::size_t worst = 0;
        for (std::size_t i = 1; i < panels.size(); ++i)
            if (panels[i].error > panels[worst].error) worst = i;
        const detail::Panel p = panels[worst];
        const double mid = 0.5 * (p.a + p.b);
        if (mid <= p.a || mid >= p.b) break;  // interval at roundoff limit
        panels[worst] = detail::gk15(f, p.a, mid);
        panels.push_back(detail::gk15(f, mid, p.b));
        total_err += panels[worst].error + panels.back().error - p.error;
    }
    // Sort by location so the final sum is independent of refinement order.
    std::sort(panels.begin(), panels.end(),
              [](const detail::Panel& x, const detail::Panel& y) { return x.a < y.a; });
    double sum = 0.0;
    for (const auto& p : panels) sum += p.value;
    return sum;
}

/// Integrates over a partition given by breakpoints, splitting the tolerance
/// evenly; breakpoints let callers pin boundary-layer locations up front.
template <typename F>
double integrate_segmented(F&& f, const std::vector<double>& breaks, double abs_tol) {
    if (breaks.size() < 2) return 0.0;
    const double per = abs_tol / static_cast<double>(breaks.size() - 1);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        sum += integrate(f, breaks[i], breaks[i + 1], per);
    return sum;
}

}  // namespace quadrature

}  // namespace hullconc
