#pragma once

#include <cmath>
#include <stdexcept>

namespace hullconc {

/// Finds the root of f in [a,b] given f(a), f(b) of opposite sign.
/// Bisection safeguarded by secant steps; terminates when the bracket is
/// narrower than xtol. Monotone f is the intended use (CDF inversion).
template <typename F>
double find_root(F&& f, double a, double b, double fa, double fb, double xtol) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw std::runtime_error("find_root: endpoints do not bracket a sign change");
    for (int it = 0; it < 200 && (b - a) > xtol; ++it) {
        // Secant proposal, accepted only if it lands comfortably inside.
        double x = a - fa * (b - a) / (fb - fa);
        const double margin = 0.01 * (b - a);
        if (!(x > a + margin && x < b - margin)) x = 0.5 * (a + b);
        const double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0.0) == (fb > 0.0)) {
            b = x;
            fb = fx;
        } else {
            a = x;
            fa = fx;
        }
    }
    return 0.5 * (a + b);
}

template <typename F>
double find_root(F&& f, double a, double b, double xtol) {
    return find_root(f, a, b, f(a), f(b), xtol);
}

}  // namespace hullconc
