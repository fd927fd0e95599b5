#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "sigmak/closed_forms.hpp"
#include "sigmak/ode.hpp"

using namespace sigmak;

namespace {
MetricParams P(int n, int k, Sign s) { return MetricParams::make(n, k, s); }
} // namespace

TEST_CASE("rhs: examples") {
    const auto p = P(5, 2, Sign::Plus);
    CHECK(std::abs(rhs({0, 0.25 * std::log(5.0), 0, {}}, p)) < 1e-14);
    // (n s / 2k) - (n - 2k) / 2k = 5/4 - 1/4
    CHECK(rhs({0, 0, 0, {}}, p) == doctest::Approx(1.0));
    for (double t : {-2.0, 0.0, 0.3, 1.5}) {
        const double sech2 = 1 / (std::cosh(t) * std::cosh(t));
        CHECK(rhs({t, std::log(std::cosh(t)), std::tanh(t), {}}, p) == doctest::Approx(sech2));
    }
    CHECK_THROWS_AS(rhs({0, 0, 1.0, {}}, p), ContractError);
}

TEST_CASE("property: rhs solves the sigma_k equation and conserves h") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1.5, 1.5), v(-0.9, 0.9), q(1.1, 2.0);
    for (int i = 0; i < 500; ++i) {
        const int n = std::uniform_int_distribution<int>(3, 8)(rng);
        const int k = std::uniform_int_distribution<int>(2, std::min(4, n))(rng);
        const Sign s = i % 2 ? Sign::Plus : Sign::Minus;
        const auto p = P(n, k, s);
        const double xi = u(rng);
        const double xt = (i / 2) % 2 ? v(rng) : q(rng) * (rng() % 2 ? 1 : -1);
        const double a = rhs({0, xi, xt, {}}, p);
        CHECK(a == doctest::Approx(oracle::xi_tt(n, k, to_int(s), xi, xt)).epsilon(1e-10));
        const double w = 1 - xt * xt;
        const double cp = std::pow(2.0, 1 - k) * oracle::choose(n, k);
        const double mag = cp * std::pow(std::abs(w), k - 1) * std::exp(2.0 * k * xi) *
                           (double(k) / n * std::abs(a) + std::abs(0.5 - double(k) / n) * std::abs(w));
        const double sk = sigma_l_log({0, xi, xt, a}, k, p);
        CHECK(std::abs(sk - normalized_sigma(p)) <= 1e-13 * std::max(1.0, mag));
        // dh/dt = h_xi xi_t + h_{xi_t} xi_tt with the partials of h = e^{(2k-n)xi} w^k - s e^{-n xi}
        const double A = std::exp((2.0 * k - n) * xi), B = std::exp(-n * xi);
        const double h_xi = (2.0 * k - n) * A * std::pow(w, k) + to_int(s) * n * B;
        const double h_xit = -2.0 * k * xt * A * std::pow(w, k - 1);
        const double dh = h_xi * xt + h_xit * a;
        const double sc = std::abs((2.0 * k - n) * A * std::pow(w, k) * xt) + n * B * std::abs(xt) + std::abs(h_xit * a);
        CHECK(std::abs(dh) <= 1e-13 * sc);
    }
}

TEST_CASE("integrate: round sphere reproduces ln cosh") {
    const auto p = P(5, 2, Sign::Plus);
    IntegrationConfig cfg;
    cfg.max_span = 10;
    const Trajectory tr = integrate({0, 0, 0, {}}, p, cfg);
    double worst = 0;
    for (const auto& s : tr.samples) {
        if (std::abs(s.state.t) > 2.5) continue; // h = 0 is ill-conditioned beyond this window
        worst = std::max(worst, std::abs(s.state.xi - std::log(std::cosh(s.state.t))));
    }
    CHECK(worst <= 1e-8);
    CHECK(drift_report(tr) <= 1e-9);
    for (std::size_t i = 1; i < tr.samples.size(); ++i) REQUIRE(tr.samples[i].state.t > tr.samples[i - 1].state.t);
}

TEST_CASE("integrate: agrees with a fixed-step RK4 oracle") {
    const auto p = P(6, 2, Sign::Plus);
    const LogState st{0, 0.1, 0.2, {}};
    IntegrationConfig cfg;
    cfg.max_span = 1.0;
    const Trajectory tr = integrate(st, p, cfg);
    REQUIRE(tr.outer_end.kind == EventKind::SpanExhausted);
    const auto [xi, xt] = oracle::rk4(6, 2, 1, 0.1, 0.2, 1e-3, 1000);
    const auto& last = tr.samples.back();
    CHECK(last.state.t == doctest::Approx(1.0));
    CHECK(last.state.xi == doctest::Approx(xi).epsilon(1e-9));
    CHECK(last.state.xi_t == doctest::Approx(xt).epsilon(1e-9));
}

TEST_CASE("integrate: null points for h < 0") {
    const auto p = P(5, 2, Sign::Plus);
    const double h = -0.5;
    const auto tps = turning_points(h, p);
    REQUIRE(tps.size() == 1);
    const Trajectory tr = integrate({0, tps[0], 0, {}}, p);
    const double xs = -std::log(0.5) / 5;
    REQUIRE(tr.inner_end.kind == EventKind::NullPoint);
    REQUIRE(tr.outer_end.kind == EventKind::NullPoint);
    CHECK(tr.inner_end.xi == doctest::Approx(xs).epsilon(1e-8));
    CHECK(tr.outer_end.xi == doctest::Approx(xs).epsilon(1e-8));
    CHECK(tr.inner_end.side * tr.outer_end.side == -1);
    CHECK(tr.inner_end.t < 0);
    CHECK(tr.outer_end.t > 0);
    CHECK(tr.scaled_drift <= 1e-8);
}

TEST_CASE("integrate: cylinder start is an equilibrium") {
    const auto p = P(5, 2, Sign::Plus);
    const Trajectory tr = integrate({0, critical_xi(p), 0, {}}, p);
    CHECK(tr.outer_end.kind == EventKind::Equilibrium);
    CHECK(drift_report(tr) == 0.0);
    for (const auto& s : tr.samples) CHECK(s.state.xi == critical_xi(p));
}

TEST_CASE("integrate: contract") {
    const auto p = P(5, 2, Sign::Plus);
    CHECK_THROWS_AS(integrate({0, 0, 1.0, {}}, p), ContractError);
    CHECK_THROWS_AS(integrate({0, 1e3, 0.0, {}}, p), ContractError);
}

TEST_CASE("drift grows with tolerance") {
    const auto p = P(5, 2, Sign::Plus);
    double prev = -1;
    for (double tol : {1e-12, 1e-10, 1e-8, 1e-6}) {
        IntegrationConfig cfg;
        cfg.max_step = 10; // otherwise the step cap, not the tolerance, bounds the error
        cfg.rel_tol = tol;
        cfg.abs_tol = tol;
        cfg.max_span = 5;
        const double d = drift_report(integrate({0, 0.5, 0.1, {}}, p, cfg));
        CHECK(d > prev);
        prev = d;
    }
}

TEST_CASE("time_quadrature") {
    const auto p = P(5, 2, Sign::Plus);
    CHECK(time_quadrature(0.0, std::log(std::cosh(2.0)), 0.0, p, Branch::Positive, 1) == doctest::Approx(2.0).epsilon(1e-9));
    const auto tp = turning_points(0.3, p);
    const double mid = 0.5 * (tp[0] + tp[1]);
    const double a = time_quadrature(tp[0], mid, 0.3, p, Branch::Positive, 1);
    const double b = time_quadrature(tp[1], mid, 0.3, p, Branch::Positive, -1);
    CHECK(a > 0);
    CHECK(b > 0);
    const double half = time_quadrature(tp[0], tp[1], 0.3, p, Branch::Positive, 1);
    CHECK(std::abs(half - 0.5 * period(0.3, p)) <= 1e-8);
    CHECK_THROWS_AS(time_quadrature(-1.0, 1.0, -0.5, p, Branch::Positive, 1), DomainError);
}

TEST_CASE("period: regime and trend") {
    const auto p = P(5, 2, Sign::Plus);
    const double hs = critical_h(p);
    // Near the tangency the period tends to the linearized value; it is
    // monotone on the approach.
    CHECK(period(hs - 1e-6, p) < period(hs - 1e-2, p));
    CHECK(period(hs - 1e-2, p) < period(0.3, p));
    CHECK(period(0.3, p) < period(0.01, p));
    CHECK_THROWS_AS(period(0.0, p), DomainError);
    CHECK_THROWS_AS(period(0.6, p), DomainError);
    CHECK_THROWS_AS(period(0.3, P(4, 2, Sign::Plus)), DomainError);

    // return map from the lower turning point
    const auto tp = turning_points(0.3, p);
    IntegrationConfig cfg;
    cfg.max_span = 2.5 * period(0.3, p);
    const Trajectory tr = integrate({0, tp[0], 0, {}}, p, cfg);
    int lows = 0;
    double t_return = 0;
    for (const auto& e : tr.events)
        if (e.kind == EventKind::TurningPoint && e.t > 0.1 && std::abs(e.xi - tp[0]) < 1e-6 && !lows++) t_return = e.t;
    REQUIRE(lows >= 1);
    CHECK(t_return == doctest::Approx(period(0.3, p)).epsilon(1e-5));
}

TEST_CASE("null_approach: blow-up side") {
    const auto p = P(5, 2, Sign::Plus);
    const auto tps = turning_points(-0.5, p);
    const Trajectory tr = integrate({0, tps[0], 0, {}}, p);
    const double deltas[] = {1e-6, 1e-5};
    for (const EventRecord& ev : {tr.inner_end, tr.outer_end}) {
        const auto ap = null_approach(ev, Branch::Positive, p, deltas);
        REQUIRE(ap.size() == 2);
        for (const auto& a : ap) {
            CHECK(std::abs(a.sample.state.xi_t - ev.side) < 1e-2);
            CHECK(std::abs(a.sample.state.xi - ev.xi) == doctest::Approx(a.delta).epsilon(1e-6));
        }
    }
}
