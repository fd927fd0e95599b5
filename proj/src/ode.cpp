#include "sigmak/ode.hpp"

#include <algorithm>
#include <cmath>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dopri5.hpp"

namespace sigmak {

namespace {

using V2 = detail::Vec<2>;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Ctx {
    MetricParams p;
    int bsign = 1;    // sign of 1 - xi_t^2
    double wsign = 1; // sign of (1 - xi_t^2)^k on the admissible side
    IntegrationConfig cfg;
    double lo = -60, hi = 60;

    // V = e^{2k xi} (1 - xi_t^2)^k - s = h e^{n xi}. Carrying V instead of
    // e^{2k xi} w^k keeps h to relative accuracy when V is small against s.
    double w_of_V(double xi, double V) const {
        return bsign * std::pow(std::abs(V + p.sign()), 1.0 / p.k) * std::exp(-2.0 * xi);
    }
    double V_of_w(double xi, double w) const {
        return std::pow(w, p.k) * std::exp(2.0 * p.k * xi) - p.sign();
    }
    double p_of_V(double xi, double V, int dir) const { return dir * std::sqrt(1.0 - w_of_V(xi, V)); }
    double dV(double V) const { return p.n * V; }

    V2 f_t(double, const V2& y) const {
        return {y[1], rhs_w(y[0], 1.0 - y[1] * y[1], p)};
    }
    V2 f_xi(double x, const V2& y, int dir) const { return {1.0 / p_of_V(x, y[1], dir), dV(y[1])}; }
};

struct Cursor {
    double t = 0, xi = 0, p = 0, w = 1, V = 0;
    bool xi_chart = false;
    int dir = 1;
};

TrajectorySample make_sample(const Ctx& c, double t, double xi, double p, double w) {
    TrajectorySample s;
    s.state.t = t;
    s.state.xi = xi;
    s.state.xi_t = p;
    s.state.xi_tt = rhs_w(xi, w, c.p);
    s.w = w;
    return s;
}

LogState as_state(const Cursor& cur) {
    LogState s;
    s.t = cur.t;
    s.xi = cur.xi;
    s.xi_t = cur.p;
    return s;
}

struct OneWay {
    std::vector<TrajectorySample> samples;
    std::vector<EventRecord> events; // non-terminal, in integration order
    EventRecord end;
};

// Bisection on the fraction of an accepted step. `g` is positive before the event.
template <class F, class G>
std::pair<double, V2> locate(const F& f, double x0, const V2& y0, double H, const G& g, const Ctx& c,
                             double stop_w = 0.0) {
    double lo = 0.0, hi = 1.0;
    V2 ylo = y0;
    for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
        const double m = 0.5 * (lo + hi);
        const auto r = detail::dopri5_step<2>(f, x0, y0, m * H, c.cfg.rel_tol, c.cfg.abs_tol);
        if (g(x0 + m * H, r.y) > 0) {
            lo = m;
            ylo = r.y;
            if (stop_w > 0 && std::abs(c.w_of_V(x0 + m * H, ylo[1])) <= stop_w) break;
        } else {
            hi = m;
        }
    }
    return {lo, ylo};
}

OneWay run_one_way(const Cursor& start, int tau, const Ctx& c) {
    OneWay out;
    Cursor cur = start;
    const double t0 = start.t;
    const auto& cfg = c.cfg;
    double hstep = std::min(cfg.max_step, 1e-2);
    long steps = 0;

    auto grow = [&](double err) {
        const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        hstep = std::min(cfg.max_step, hstep * fac);
    };
    auto shrink = [&](double err, double x) {
        const double fac = std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.25), 0.1, 0.9) : 0.1;
        hstep *= fac;
        if (hstep < 1e-15 * std::max(1.0, std::abs(x)))
            throw IntegrationError("step size underflow", as_state(cur));
    };
    auto terminal = [&](EventKind kind, int side) {
        out.end.kind = kind;
        out.end.t = cur.t;
        out.end.xi = cur.xi;
        out.end.xi_t = cur.p;
        out.end.side = side;
    };

    while (true) {
        if (++steps > cfg.max_steps) throw IntegrationError("step budget exhausted", as_state(cur));

        if (!cur.xi_chart) {
            auto f = [&](double x, const V2& y) { return c.f_t(x, y); };
            const double remaining = cfg.max_span - std::abs(cur.t - t0);
            const bool landing = hstep >= remaining;
            const double H = landing ? (t0 + tau * cfg.max_span) - cur.t : tau * hstep;
            const V2 y0{cur.xi, cur.p};
            const auto r = detail::dopri5_step<2>(f, cur.t, y0, H, cfg.rel_tol, cfg.abs_tol);
            if (!(r.err <= 1.0)) {
                shrink(r.err, cur.t);
                continue;
            }
            const V2 y1 = r.y;

            // escape through the xi window
            double th_e = 2.0;
            V2 y_e{};
            int esc_side = 0;
            if (y1[0] > c.hi || y1[0] < c.lo) {
                esc_side = y1[0] > c.hi ? 1 : -1;
                const double bound = esc_side > 0 ? c.hi : c.lo;
                auto g = [&](double, const V2& y) { return esc_side * (bound - y[0]); };
                std::tie(th_e, y_e) = locate(f, cur.t, y0, H, g, c);
            }
            // turning point
            if (cur.p != 0.0 && (y1[1] == 0.0 || (y1[1] > 0) != (cur.p > 0))) {
                const double s0 = cur.p > 0 ? 1.0 : -1.0;
                auto g = [&](double, const V2& y) { return s0 * y[1]; };
                auto [th, yt] = locate(f, cur.t, y0, H, g, c);
                if (th < th_e) {
                    EventRecord ev;
                    ev.kind = EventKind::TurningPoint;
                    ev.t = cur.t + th * H;
                    ev.xi = yt[0];
                    ev.xi_t = 0.0;
                    out.events.push_back(ev);
                }
            }
            if (esc_side != 0) {
                cur.t += th_e * H;
                cur.xi = y_e[0];
                cur.p = y_e[1];
                cur.w = 1.0 - cur.p * cur.p;
                out.samples.push_back(make_sample(c, cur.t, cur.xi, cur.p, cur.w));
                terminal(EventKind::Escape, esc_side);
                return out;
            }
            cur.t += H;
            cur.xi = y1[0];
            cur.p = y1[1];
            cur.w = std::fma(-cur.p, cur.p, 1.0);
            out.samples.push_back(make_sample(c, cur.t, cur.xi, cur.p, cur.w));
            if (landing) {
                terminal(EventKind::SpanExhausted, 0);
                return out;
            }
            grow(r.err);
            if (std::abs(cur.p) > cfg.chart_enter) {
                cur.xi_chart = true;
                cur.dir = cur.p > 0 ? 1 : -1;
                cur.V = c.V_of_w(cur.xi, cur.w);
                hstep = std::min(cfg.max_step, hstep * std::abs(cur.p));
            }
        } else {
            const int dir = cur.dir;
            auto f = [&](double x, const V2& y) { return c.f_xi(x, y, dir); };
            const int sigma = tau * dir;
            const double dist = sigma > 0 ? c.hi - cur.xi : cur.xi - c.lo;
            const bool landing = hstep >= dist;
            const double H = landing ? sigma * dist : sigma * hstep;
            const V2 y0{cur.t, cur.V};
            const auto r = detail::dopri5_step<2>(f, cur.xi, y0, H, cfg.rel_tol, cfg.abs_tol);
            if (!(r.err <= 1.0)) {
                shrink(r.err, cur.xi);
                continue;
            }
            const V2 y1 = r.y;

            double th_n = 2.0, th_s = 2.0;
            V2 y_n{}, y_s{};
            if (c.wsign * (y1[1] + c.p.sign()) <= 0.0) {
                auto g = [&](double, const V2& y) { return c.wsign * (y[1] + c.p.sign()); };
                std::tie(th_n, y_n) = locate(f, cur.xi, y0, H, g, c, cfg.event_epsilon);
            }
            if (std::abs(y1[0] - t0) >= cfg.max_span) {
                auto g = [&](double, const V2& y) { return cfg.max_span - std::abs(y[0] - t0); };
                std::tie(th_s, y_s) = locate(f, cur.xi, y0, H, g, c);
            }
            if (th_n <= th_s && th_n <= 1.0) {
                const double xl = cur.xi + th_n * H;
                const double wl = c.w_of_V(xl, y_n[1]);
                const double pl = dir * std::sqrt(1.0 - wl);
                cur.t = y_n[0];
                cur.xi = xl;
                cur.V = y_n[1];
                cur.p = pl;
                cur.w = wl;
                out.samples.push_back(make_sample(c, cur.t, cur.xi, cur.p, cur.w));
                // close the remaining gap along the regular parametrization
                const double dV = c.dV(y_n[1]);
                const double dxi = dV != 0.0 ? -(y_n[1] + c.p.sign()) / dV : 0.0;
                out.end.kind = EventKind::NullPoint;
                out.end.xi = xl + dxi;
                out.end.t = cur.t + dxi / pl;
                out.end.xi_t = dir;
                out.end.side = dir;
                return out;
            }
            if (th_s <= 1.0) {
                cur.xi += th_s * H;
                cur.t = y_s[0];
                cur.V = y_s[1];
                cur.w = c.w_of_V(cur.xi, cur.V);
                cur.p = dir * std::sqrt(1.0 - cur.w);
                out.samples.push_back(make_sample(c, cur.t, cur.xi, cur.p, cur.w));
                terminal(EventKind::SpanExhausted, 0);
                return out;
            }
            cur.xi = landing ? (sigma > 0 ? c.hi : c.lo) : cur.xi + H;
            cur.t = y1[0];
            cur.V = y1[1];
            cur.w = c.w_of_V(cur.xi, cur.V);
            cur.p = dir * std::sqrt(1.0 - cur.w);
            out.samples.push_back(make_sample(c, cur.t, cur.xi, cur.p, cur.w));
            if (landing) {
                terminal(EventKind::Escape, sigma);
                return out;
            }
            grow(r.err);
            if (c.bsign > 0 && std::abs(cur.p) < cfg.chart_exit) {
                cur.xi_chart = false;
                hstep = std::min(cfg.max_step, hstep / std::max(std::abs(cur.p), 1e-3));
            }
        }
    }
}

Ctx make_ctx(const MetricParams& p, Branch b, const IntegrationConfig& cfg) {
    Ctx c;
    c.p = p;
    c.bsign = to_int(b);
    c.wsign = (c.bsign < 0 && p.k % 2 == 1) ? -1.0 : 1.0;
    c.cfg = cfg;
    std::tie(c.lo, c.hi) = xi_window(p, cfg);
    return c;
}

} // namespace

const char* to_string(EventKind k) {
    switch (k) {
    case EventKind::NullPoint: return "NullPoint";
    case EventKind::TurningPoint: return "TurningPoint";
    case EventKind::Equilibrium: return "Equilibrium";
    case EventKind::SpanExhausted: return "SpanExhausted";
    case EventKind::Escape: return "Escape";
    }
    return "?";
}

std::pair<double, double> xi_window(const MetricParams& p, const IntegrationConfig& cfg) {
    const double def = std::min(60.0, exponent_window(p));
    const double lo = std::isnan(cfg.xi_lower) ? -def : cfg.xi_lower;
    const double hi = std::isnan(cfg.xi_upper) ? def : cfg.xi_upper;
    return {lo, hi};
}

double rhs_w(double xi, double w, const MetricParams& p) {
    const double k2 = 2.0 * p.k;
    double lead = 0.0;
    if (p.s != Sign::Zero) lead = (p.n * p.sign() / k2) * std::exp(-k2 * xi) * std::pow(w, 1 - p.k);
    return lead - (p.gap() / k2) * w;
}

double rhs(const LogState& state, const MetricParams& p) {
    if (p.s != Sign::Zero && p.k >= 2 && std::abs(state.xi_t) == 1.0)
        throw ContractError("rhs: singular locus |xi_t| = 1");
    return rhs_w(state.xi, 1.0 - state.xi_t * state.xi_t, p);
}

Trajectory integrate(const LogState& initial, const MetricParams& p, const IntegrationConfig& cfg) {
    const double w0 = std::fma(-initial.xi_t, initial.xi_t, 1.0);
    if (std::abs(w0) <= cfg.event_epsilon)
        throw ContractError("integrate: initial state on the singular locus |xi_t| = 1");
    const Branch b = w0 > 0 ? Branch::Positive : Branch::Negative;
    const Ctx c = make_ctx(p, b, cfg);
    if (initial.xi < c.lo || initial.xi > c.hi) throw ContractError("integrate: initial xi outside the window");

    Trajectory traj;
    traj.params = p;
    traj.h0.h = first_integral(initial.xi, w0, p);
    traj.h0.branch = b;
    traj.h0.params = p;

    const double xtt0 = rhs_w(initial.xi, w0, p);
    TrajectorySample s0 = make_sample(c, initial.t, initial.xi, initial.xi_t, w0);

    if (std::abs(initial.xi_t) <= 1e-14 && std::abs(xtt0) <= 1e-12) {
        EventRecord eq;
        eq.kind = EventKind::Equilibrium;
        eq.t = initial.t;
        eq.xi = initial.xi;
        for (double dt : {-cfg.max_span, 0.0, cfg.max_span}) {
            TrajectorySample s = s0;
            s.state.t = initial.t + dt;
            traj.samples.push_back(s);
        }
        traj.events.push_back(eq);
        traj.inner_end = eq;
        traj.outer_end = eq;
        traj.drift = 0.0;
        return traj;
    }

    Cursor start;
    start.t = initial.t;
    start.xi = initial.xi;
    start.p = initial.xi_t;
    start.w = w0;
    start.V = c.V_of_w(initial.xi, w0);
    start.dir = initial.xi_t > 0 ? 1 : -1;
    start.xi_chart = b == Branch::Negative || std::abs(initial.xi_t) > cfg.chart_enter;

    OneWay back = run_one_way(start, -1, c);
    OneWay fwd = run_one_way(start, +1, c);

    for (auto it = back.samples.rbegin(); it != back.samples.rend(); ++it) traj.samples.push_back(*it);
    traj.samples.push_back(s0);
    traj.samples.insert(traj.samples.end(), fwd.samples.begin(), fwd.samples.end());
    std::vector<TrajectorySample> mono;
    mono.reserve(traj.samples.size());
    for (const auto& s : traj.samples)
        if (mono.empty() || s.state.t > mono.back().state.t) mono.push_back(s);
    traj.samples = std::move(mono);

    traj.inner_end = back.end;
    traj.outer_end = fwd.end;
    traj.events.push_back(back.end);
    for (auto it = back.events.rbegin(); it != back.events.rend(); ++it) traj.events.push_back(*it);
    traj.events.insert(traj.events.end(), fwd.events.begin(), fwd.events.end());
    traj.events.push_back(fwd.end);
    traj.drift = drift_report(traj);
    traj.scaled_drift = scaled_drift_report(traj);
    return traj;
}

double drift_report(const Trajectory& traj) {
    double d = 0.0;
    for (const auto& s : traj.samples)
        d = std::max(d, std::abs(first_integral(s.state.xi, s.w, traj.params) - traj.h0.h));
    return d;
}

double scaled_drift_report(const Trajectory& traj) {
    const auto& p = traj.params;
    double d = 0.0;
    for (const auto& s : traj.samples) {
        const double xi = s.state.xi;
        const double scale = std::exp((2.0 * p.k - p.n) * xi) * std::pow(std::abs(s.w), p.k) +
                             (p.s == Sign::Zero ? 0.0 : std::exp(-p.n * xi));
        d = std::max(d, std::abs(first_integral(xi, s.w, p) - traj.h0.h) / std::max(1.0, scale));
    }
    return d;
}

std::vector<ApproachSample> null_approach(const EventRecord& ev, Branch branch, const MetricParams& p,
                                          std::span<const double> deltas, const IntegrationConfig& cfg) {
    if (ev.kind != EventKind::NullPoint) throw ContractError("null_approach requires a NullPoint event");
    if (p.s == Sign::Zero) throw ContractError("null_approach requires s != 0");
    Ctx c = make_ctx(p, branch, cfg);
    const int dir = ev.side;
    auto f = [&](double x, const V2& y) { return c.f_xi(x, y, dir); };
    // V + s ~ -n s (xi - xi*) near the null point
    const double offset_sign = c.wsign * (-p.sign());
    std::vector<ApproachSample> out;
    for (double d : deltas) {
        double x = ev.xi;
        V2 y{ev.t, -static_cast<double>(p.sign())};
        const double target = ev.xi + offset_sign * d;
        double h = d * 1e-3;
        while (std::abs(target - x) > 0.0) {
            const double rem = target - x;
            const bool last = h >= std::abs(rem);
            const double H = last ? rem : std::copysign(h, rem);
            const auto r = detail::dopri5_step<2>(f, x, y, H, 1e-13, 1e-16);
            if (!(r.err <= 1.0)) {
                h *= 0.3;
                if (h < 1e-300) throw IntegrationError("null_approach: step underflow", LogState{});
                continue;
            }
            x = last ? target : x + H;
            y = r.y;
            h *= std::clamp(0.9 * std::pow(std::max(r.err, 1e-10), -0.2), 0.2, 5.0);
        }
        ApproachSample a;
        a.delta = d;
        a.dt = y[0] - ev.t;
        const double w = c.w_of_V(x, y[1]);
        a.sample = make_sample(c, y[0], x, dir * std::sqrt(1.0 - w), w);
        out.push_back(a);
    }
    return out;
}

// ---- quadrature oracle -------------------------------------------------------

namespace {

double gk(const std::function<double(double)>& f, double a, double b) {
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-11, &err);
    return v;
}

// 1 - D^{1/k} at anchor + delta, where D(anchor) = 1, without cancellation.
double one_minus_root_anchored(double anchor, double delta, double h, const MetricParams& p) {
    const double k2 = 2.0 * p.k;
    const double g = p.gap();
    const double dD = p.sign() * std::exp(-k2 * anchor) * std::expm1(-k2 * delta) +
                      h * std::exp(g * anchor) * std::expm1(g * delta);
    return -std::expm1(std::log1p(dD) / p.k);
}

} // namespace

double time_quadrature(double xi_from, double xi_to, double h, const MetricParams& p, Branch branch,
                       int direction_sign) {
    if (direction_sign != 1 && direction_sign != -1) throw ContractError("direction_sign must be +1 or -1");
    if (xi_from == xi_to) return 0.0;
    const double a = std::min(xi_from, xi_to);
    const double b = std::max(xi_from, xi_to);
    const double orient = xi_to > xi_from ? 1.0 : -1.0;
    const double scale_tol = 1e-9 * (1.0 + std::abs(a) + std::abs(b));

    for (double z : null_points(h, p))
        if (z > a + scale_tol && z < b - scale_tol) throw DomainError("time_quadrature: interval crosses a null point");

    double integral = 0.0;
    if (branch == Branch::Negative) {
        auto f = [&](double x) {
            const double v = level_speed(x, h, branch, p);
            if (std::isnan(v)) throw DomainError("time_quadrature: interval leaves the level set");
            return 1.0 / v;
        };
        integral = gk(f, a, b);
    } else {
        const auto tps = turning_points(h, p);
        for (double z : tps)
            if (z > a + scale_tol && z < b - scale_tol)
                throw DomainError("time_quadrature: interval crosses a turning point");
        const double m = 0.5 * (a + b);
        const double reach = 0.5 * (b - a);
        auto plain = [&](double x) {
            const double v = level_speed(x, h, branch, p);
            if (std::isnan(v)) throw DomainError("time_quadrature: interval leaves the level set");
            return 1.0 / v;
        };
        // left half, anchored at a turning point at or just below a
        double left_anchor = kNaN, right_anchor = kNaN;
        for (double z : tps) {
            if (z <= a + scale_tol && a - z <= reach) left_anchor = z;
            if (z >= b - scale_tol && z - b <= reach && std::isnan(right_anchor)) right_anchor = z;
        }
        if (!std::isnan(left_anchor)) {
            const double z = left_anchor;
            auto f = [&](double u) {
                const double q = one_minus_root_anchored(z, u * u, h, p);
                if (!(q > 0.0)) throw DomainError("time_quadrature: interval leaves the level set");
                return 2.0 * u / std::sqrt(q);
            };
            integral += gk(f, std::sqrt(std::max(0.0, a - z)), std::sqrt(m - z));
        } else {
            integral += gk(plain, a, m);
        }
        if (!std::isnan(right_anchor)) {
            const double z = right_anchor;
            auto f = [&](double u) {
                const double q = one_minus_root_anchored(z, -u * u, h, p);
                if (!(q > 0.0)) throw DomainError("time_quadrature: interval leaves the level set");
                return 2.0 * u / std::sqrt(q);
            };
            integral += gk(f, std::sqrt(std::max(0.0, z - b)), std::sqrt(z - m));
        } else {
            integral += gk(plain, m, b);
        }
    }
    return direction_sign * orient * integral;
}

double period(double h, const MetricParams& p) {
    if (p.s != Sign::Plus || p.gap() <= 0) throw DomainError("period: closed orbits require s=+1 and 2k<n");
    const double hs = critical_h(p);
    if (!(h > 0.0) || !(h < hs)) throw DomainError("period: closed orbits require 0 < h < h*");
    const auto tps = turning_points(h, p);
    if (tps.size() != 2) throw DomainError("period: expected two turning points");
    return 2.0 * time_quadrature(tps[0], tps[1], h, p, Branch::Positive, 1);
}

} // namespace sigmak
