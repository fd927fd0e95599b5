#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "sigmak/closed_forms.hpp"
#include "sigmak/errors.hpp"
#include "sigmak/first_integral.hpp"
#include "sigmak/ode.hpp"

using namespace sigmak;

namespace {
MetricParams P(int n, int k, Sign s) { return MetricParams::make(n, k, s); }

// Samples on the open domain, shrunk away from finite ends.
std::vector<double> grid(const ClosedForm& f, int m = 1000) {
    auto [a, b] = f.t_domain();
    a = std::isfinite(a) ? a + 1e-2 : -8.0;
    b = std::isfinite(b) ? b - 1e-2 : 8.0;
    std::vector<double> g;
    for (int i = 0; i < m; ++i) g.push_back(a + (b - a) * i / (m - 1));
    return g;
}

// Derivatives by central differences of the xi evaluator.
void check_derivatives(const ClosedForm& f) {
    for (double t : grid(f, 50)) {
        const double e = 1e-5;
        CHECK(f.xi_t(t) == doctest::Approx((f.xi(t + e) - f.xi(t - e)) / (2 * e)).epsilon(1e-6));
        CHECK(f.xi_tt(t) == doctest::Approx((f.xi_t(t + e) - f.xi_t(t - e)) / (2 * e)).epsilon(1e-6));
        CHECK(f.w(t) == doctest::Approx(1 - f.xi_t(t) * f.xi_t(t)).epsilon(1e-9));
    }
}
} // namespace

TEST_CASE("round sphere") {
    const auto p = P(5, 2, Sign::Plus);
    const ClosedForm f = round_sphere(1.0, p);
    const RadialJet j = f.jet(1.0);
    CHECK(j.v == doctest::Approx(1.0));
    CHECK(f.xi(0) == doctest::Approx(0.0));
    CHECK(f.xi_t(0) == doctest::Approx(0.0));
    check_derivatives(round_sphere(2.3, p));
    for (double rho : {0.5, 1.0, 3.0}) {
        const ClosedForm g = round_sphere(rho, p);
        for (double r : {0.01, 0.3, 1.0, 5.0, 40.0}) {
            // v^{-2} = (2 rho / (r^2 + rho^2))^2
            CHECK(g.jet(r).v == doctest::Approx((r * r + rho * rho) / (2 * rho)));
        }
        for (double t : grid(g)) REQUIRE(std::abs(conserved_h(g.state(t), p).h) <= 1e-12 * std::exp(-5 * std::min(0.0, g.xi(t))));
    }
    for (auto [n, k] : {std::pair{4, 2}, {5, 2}, {6, 3}}) {
        const auto q = P(n, k, Sign::Plus);
        const ClosedForm g = round_sphere(1.7, q);
        const double want = std::pow(2.0, -k) * oracle::choose(n, k);
        for (double t : grid(g, 100))
            REQUIRE(sigma_l_from_w(g.xi(t), g.w(t), g.xi_tt(t), k, n) == doctest::Approx(want).epsilon(1e-10));
        for (double r : {0.2, 1.0, 3.0})
            CHECK(sigma_k_radial(g.jet(r), q) == doctest::Approx(want).epsilon(1e-10));
    }
    CHECK_THROWS_AS(round_sphere(0.0, p), DomainError);
}

TEST_CASE("cylinder") {
    const auto p = P(5, 2, Sign::Plus);
    const ClosedForm c = cylinder(p, critical_h(p));
    CHECK(c.xi(3.0) == doctest::Approx(0.25 * std::log(5.0)));
    CHECK(c.xi(3.0) == doctest::Approx(0.402359).epsilon(1e-6));
    CHECK(std::abs(rhs(c.state(0), p)) <= 1e-12);
    const auto m = P(3, 2, Sign::Minus);
    const ClosedForm d = cylinder(m, critical_h(m));
    CHECK(d.xi(0) == doctest::Approx(std::log(4 / 1.754766) / 3).epsilon(1e-6));
    CHECK(d.xi(0) == doctest::Approx(0.274653).epsilon(1e-5));
    CHECK(std::abs(rhs(d.state(0), m)) <= 1e-12);
    CHECK_THROWS_AS(cylinder(p, 0.5), DomainError);
}

TEST_CASE("hyperbolic") {
    for (auto [n, k, s] : {std::tuple{5, 2, Sign::Plus}, {7, 3, Sign::Minus}, {4, 2, Sign::Plus}, {6, 4, Sign::Plus}}) {
        const auto p = P(n, k, s);
        const ClosedForm f = hyperbolic(p);
        check_derivatives(f);
        const double want = std::pow(-1.0, k) * std::pow(2.0, -k) * oracle::choose(n, k);
        for (double t : grid(f, 200)) {
            REQUIRE(std::abs(conserved_h(f.state(t), p).h) <= 1e-12 * std::max(1.0, std::exp(-n * f.xi(t))));
            REQUIRE(sigma_l_from_w(f.xi(t), f.w(t), f.xi_tt(t), k, n) == doctest::Approx(want).epsilon(1e-10));
        }
        // v^{-2} ~ (r_+ - r)^{-2}: log-log slope of v^{-2} against 1 - r near r_+ = 1
        const double a = 1e-4, b = 1e-5;
        const double va = f.jet(1 - a).v, vb = f.jet(1 - b).v;
        const double slope = (std::log(1 / (vb * vb)) - std::log(1 / (va * va))) / (std::log(b) - std::log(a));
        CHECK(slope == doctest::Approx(-2.0).epsilon(0.01));
    }
    CHECK_THROWS_AS(hyperbolic(P(5, 2, Sign::Minus)), ContractError);
    CHECK_THROWS_AS(hyperbolic(P(7, 3, Sign::Plus)), ContractError);
}

TEST_CASE("flat families") {
    const auto p = P(5, 2, Sign::Zero);
    const ClosedForm lin = flat_family(FlatSelector::Linear, 0, 0.3, p, 1);
    for (double t : {-1.0, 0.0, 2.0}) {
        CHECK(lin.xi(t) == doctest::Approx(t + 0.3));
        CHECK(sigma_l_log(lin.state(t), 2, p) == 0.0);
    }
    const ClosedForm sh = flat_family(FlatSelector::Sinh, 0, 0, p, 1);
    CHECK(sh.beta() == doctest::Approx(-0.25));
    for (double t : {0.5, 1.0, 3.0}) CHECK(sh.xi(t) == doctest::Approx(-4 * std::log(std::abs(std::sinh(-t / 4)))));
    check_derivatives(sh);
    check_derivatives(flat_family(FlatSelector::Sinh, 0.5, 1.0, p, -1));
    for (auto [n, k] : {std::pair{5, 2}, {3, 2}, {7, 3}}) {
        const auto q = P(n, k, Sign::Zero);
        for (auto sel : {FlatSelector::Sinh, FlatSelector::Cosh}) {
            const ClosedForm f = flat_family(sel, 0.2, -0.4, q, 1);
            check_derivatives(f);
            for (double t : grid(f)) {
                // eta = xi_t obeys eta_t = beta (1 - eta^2)
                REQUIRE(std::abs(f.xi_tt(t) - f.beta() * f.w(t)) <= 1e-12 * std::max(1.0, std::abs(f.xi_tt(t))));
                const double sk = sigma_l_from_w(f.xi(t), f.w(t), f.xi_tt(t), k, n);
                const double sc = std::pow(std::abs(f.w(t)), k) * std::exp(2 * k * f.xi(t)) * oracle::choose(n, k);
                REQUIRE(std::abs(sk) <= 1e-9 * std::max(1.0, sc));
            }
        }
    }
    CHECK_THROWS_AS(flat_family(FlatSelector::Sinh, 0, 0, P(4, 2, Sign::Zero)), ContractError);
    CHECK_THROWS_AS(flat_family(FlatSelector::Cosh, 0, 0, P(4, 2, Sign::Zero)), ContractError);
    CHECK_NOTHROW(flat_family(FlatSelector::Linear, 0, 0, P(4, 2, Sign::Zero)));
}

TEST_CASE("property: integration reproduces closed forms") {
    IntegrationConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    cfg.max_span = 2.5;
    auto sup_err = [&](const ClosedForm& f, double t0, const MetricParams& p) {
        LogState s = f.state(t0);
        const Trajectory tr = integrate(s, p, cfg);
        double e = 0;
        // near a boundary xi_t ~ e^{-xi}, where any t error is amplified into xi
        for (const auto& x : tr.samples)
            if (std::abs(x.state.xi_t) <= 10.0) e = std::max(e, std::abs(x.state.xi - f.xi(x.state.t)));
        return e;
    };
    const auto p = P(5, 2, Sign::Plus);
    CHECK(sup_err(round_sphere(1.7, p), 0.2, p) <= 1e-8);
    CHECK(sup_err(hyperbolic(p), -1.0, p) <= 1e-8);
}
