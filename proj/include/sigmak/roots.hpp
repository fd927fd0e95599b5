#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "sigmak/errors.hpp"

namespace sigmak::roots {

// Bisection on a sign-changing bracket down to `width`, then Newton polish
// steps that are kept only while they stay inside the bracket and reduce |f|.
inline double bisect_newton(const std::function<double(double)>& f,
                            const std::function<double(double)>& df, double a, double b,
                            double width = 1e-13) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0)) throw DomainError("bisect_newton: root not bracketed");
    if (a > b) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    for (int it = 0; it < 400 && (b - a) > width * (1.0 + std::abs(a) + std::abs(b)) * 0.5; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0) == (fa > 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    double x = 0.5 * (a + b);
    double fx = f(x);
    for (int it = 0; it < 3; ++it) {
        const double d = df(x);
        if (d == 0.0 || !std::isfinite(d)) break;
        const double nx = x - fx / d;
        if (!(nx >= a && nx <= b)) break;
        const double nfx = f(nx);
        if (!(std::abs(nfx) < std::abs(fx))) break;
        x = nx;
        fx = nfx;
    }
    return x;
}

} // namespace sigmak::roots
