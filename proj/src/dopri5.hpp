#pragma once

// Dormand-Prince 5(4) single step for small fixed-size systems.

#include <array>
#include <cmath>
#include <cstddef>

namespace sigmak::detail {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
struct StepResult {
    Vec<N> y;
    double err = 0.0; // scaled error norm, <= 1 accepts
    bool finite = true;
};

template <std::size_t N, class F>
StepResult<N> dopri5_step(const F& f, double x, const Vec<N>& y, double h, double rtol, double atol) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    auto comb = [&](std::initializer_list<std::pair<double, const Vec<N>*>> terms) {
        Vec<N> out = y;
        for (auto& [c, k] : terms)
            for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
        return out;
    };

    const Vec<N> k1 = f(x, y);
    const Vec<N> k2 = f(x + c2 * h, comb({{a21, &k1}}));
    const Vec<N> k3 = f(x + c3 * h, comb({{a31, &k1}, {a32, &k2}}));
    const Vec<N> k4 = f(x + c4 * h, comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const Vec<N> k5 = f(x + c5 * h, comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const Vec<N> k6 = f(x + h, comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    StepResult<N> r;
    r.y = comb({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const Vec<N> k7 = f(x + h, r.y);

    double norm = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(r.y[i]));
        const double q = std::abs(e) / sc;
        if (!std::isfinite(q) || !std::isfinite(r.y[i])) r.finite = false;
        norm = std::max(norm, q);
    }
    r.err = r.finite ? norm : INFINITY;
    return r;
}

} // namespace sigmak::detail
