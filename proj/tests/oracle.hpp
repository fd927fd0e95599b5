#pragma once

// Test-side reference computations, written from the defining formulas and
// sharing no code with the library.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// e_k of the values, by the standard recurrence over prefixes.
inline double elementary_symmetric(const std::vector<double>& x, int k) {
    std::vector<double> e(k + 1, 0.0);
    e[0] = 1.0;
    for (double xi : x)
        for (int j = k; j >= 1; --j) e[j] += xi * e[j - 1];
    return e[k];
}

inline double choose(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

// Golden-section search for the minimum of a unimodal function.
inline double golden_min(const std::function<double(double)>& f, double a, double b, int iters = 200) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    for (int i = 0; i < iters; ++i) {
        if (f(c) < f(d)) b = d; else a = c;
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    return 0.5 * (a + b);
}

inline double bisect(const std::function<double(double)>& f, double a, double b, int iters = 200) {
    double fa = f(a);
    for (int i = 0; i < iters; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm > 0) == (fa > 0)) { a = m; fa = fm; } else b = m;
    }
    return 0.5 * (a + b);
}

// xi_tt of the normalized equation, from sigma_k = s 2^{-k} C(n,k) solved for xi_tt.
inline double xi_tt(int n, int k, int s, double xi, double xi_t) {
    const double w = 1.0 - xi_t * xi_t;
    const double target = s * std::pow(2.0, -k) * choose(n, k);
    const double cp = std::pow(2.0, 1 - k) * choose(n, k);
    const double bracket = target / (cp * std::pow(w, k - 1) * std::exp(2.0 * k * xi));
    return (bracket - (0.5 - double(k) / n) * w) * n / k;
}

// Fixed-step classical RK4 on (xi, xi_t); returns the state after `steps` steps of size dt.
inline std::pair<double, double> rk4(int n, int k, int s, double xi, double xi_t, double dt, int steps) {
    auto f = [&](double x, double y) { return std::pair{y, xi_tt(n, k, s, x, y)}; };
    for (int i = 0; i < steps; ++i) {
        auto [a1, b1] = f(xi, xi_t);
        auto [a2, b2] = f(xi + 0.5 * dt * a1, xi_t + 0.5 * dt * b1);
        auto [a3, b3] = f(xi + 0.5 * dt * a2, xi_t + 0.5 * dt * b2);
        auto [a4, b4] = f(xi + dt * a3, xi_t + dt * b3);
        xi += dt / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4);
        xi_t += dt / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4);
    }
    return {xi, xi_t};
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

} // namespace oracle
