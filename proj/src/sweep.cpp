#include "sigmak/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "sigmak/errors.hpp"
#include "sigmak/first_integral.hpp"
#include "sigmak/verify.hpp"

namespace sigmak {

const std::vector<std::string>& all_leaves() {
    static const std::vector<std::string> leaves{
        "Thm1.I.1",   "Thm1.I.2",   "Thm1.I.3a",  "Thm1.I.3b",  "Thm1.I.3c",  "Thm1.II.1",  "Thm1.II.2",
        "Thm1.II.3a", "Thm1.II.3b", "Thm1.II.3c", "Thm1.III.1", "Thm1.III.2", "Thm1.III.3", "Thm2.I.1",
        "Thm2.I.2a",  "Thm2.I.2b",  "Thm2.I.2c",  "Thm2.I.3a",  "Thm2.I.3b",  "Thm2.I.3c",  "Thm2.I.3d",
        "Thm2.I.3e",  "Thm2.I.3f",  "Thm2.II.1",  "Thm2.II.2",  "Thm2.II.3a", "Thm2.II.3b", "Thm2.II.3c",
        "Thm2.III.1", "Thm2.III.2", "Thm2.III.3"};
    return leaves;
}

namespace {

std::string describe(const EventRecord& e) {
    std::ostringstream os;
    os << to_string(e.kind) << "(side=" << e.side << ", xi=" << e.xi << ", xi_t=" << e.xi_t << ")";
    return os.str();
}

// Exponent of |x| in g = v^{-2}|dx|^2 at a power-law end: -2 (1 + xi_t).
double local_power(const EventRecord& e) { return -2.0 * (1.0 + e.xi_t); }

Agreement check_end(const EndpointBehavior& b, const EventRecord& e, bool inner, const Trajectory& traj,
                    const MetricParams& p) {
    Agreement a;
    const char* where = inner ? "inner" : "outer";
    auto fail = [&](const std::string& what) {
        a.ok = false;
        a.why = std::string(where) + " " + to_string(b.kind) + ": " + what + "; got " + describe(e);
        return a;
    };
    const double far_slope = inner ? -1.0 : 1.0;
    switch (b.kind) {
    case EndpointKind::SecondDerivBlowup: {
        const int side = b.vr_limit == 0 ? -1 : 1;
        if (e.kind != EventKind::NullPoint || e.side != side) return fail("expected NullPoint");
        return a;
    }
    case EndpointKind::RoundSphereClosure:
    case EndpointKind::SmoothCenter: {
        if (e.kind != EventKind::SpanExhausted || std::abs(e.xi_t - far_slope) > 1e-2)
            return fail("expected xi_t -> " + std::to_string(static_cast<int>(far_slope)));
        // smooth closure: |1 - xi_t^2| ~ e^{-2|t|}; fit over the stretch where it is below 0.1
        std::vector<double> ts, lw;
        for (const auto& s : traj.samples) {
            const bool far_side = inner ? s.state.t < 0.0 : s.state.t > 0.0;
            if (far_side && std::abs(s.w) < 0.1 && s.w != 0.0) {
                ts.push_back(s.state.t);
                lw.push_back(std::log(std::abs(s.w)));
            }
        }
        if (ts.size() < 4) return fail("too few samples near the closure");
        const double rate = verify::least_squares_slope(ts, lw);
        if (std::abs(rate + 2.0 * far_slope) > 0.1)
            return fail("decay rate of 1 - xi_t^2 is " + std::to_string(rate) + ", expected " +
                        std::to_string(-2.0 * far_slope));
        return a;
    }
    case EndpointKind::PeriodicComplete: {
        int turns = 0;
        for (const auto& ev : traj.events) turns += ev.kind == EventKind::TurningPoint;
        if (e.kind != EventKind::SpanExhausted || turns < 2) return fail("expected repeated turning points");
        return a;
    }
    case EndpointKind::CylinderExact:
        if (e.kind != EventKind::Equilibrium) return fail("expected Equilibrium");
        return a;
    case EndpointKind::CylinderAsymptote: {
        const double xs = critical_xi(p);
        if (e.kind != EventKind::SpanExhausted || std::abs(e.xi - xs) > 0.1 || std::abs(e.xi_t) > 1e-2)
            return fail("expected approach to xi*");
        return a;
    }
    case EndpointKind::ConeIncomplete:
    case EndpointKind::ConicalDegeneracy: {
        if (e.kind != EventKind::SpanExhausted) return fail("expected unbounded t");
        if (std::abs(local_power(e) - b.exponent) > 0.02 * std::abs(b.exponent))
            return fail("power " + std::to_string(local_power(e)) + " vs " + std::to_string(b.exponent));
        return a;
    }
    case EndpointKind::CkExtension:
        if (e.kind != EventKind::SpanExhausted || std::abs(e.xi_t - far_slope) > 1e-3)
            return fail("expected xi_t -> " + std::to_string(static_cast<int>(far_slope)));
        return a;
    case EndpointKind::HyperbolicComplete:
    case EndpointKind::LogComplete:
        if (e.kind != EventKind::Escape || e.side != -1 || e.xi_t > -1.0)
            return fail("expected xi -> -inf in finite t");
        return a;
    case EndpointKind::PowerDegeneracy:
        if (e.kind != EventKind::Escape || e.side != 1) return fail("expected xi -> +inf in finite t");
        return a;
    case EndpointKind::LogCuspComplete:
        if (e.kind != EventKind::SpanExhausted || e.xi_t > 0.0 || e.xi_t < -0.05)
            return fail("expected xi_t -> 0-");
        return a;
    case EndpointKind::Unclassified:
        return a;
    }
    return a;
}

} // namespace

Agreement agree(const SolutionClass& cls, const Trajectory& traj, const MetricParams& p) {
    const auto ends = oriented_endpoints(cls);
    Agreement a = check_end(ends[0], traj.inner_end, true, traj, p);
    if (!a.ok) return a;
    return check_end(ends[1], traj.outer_end, false, traj, p);
}

std::vector<SweepCell> make_grid(const GridSpec& spec) {
    std::vector<SweepCell> cells;
    for (int n : spec.n) {
        for (int k : spec.k) {
            if (k > n) continue;
            for (Sign s : spec.s) {
                const MetricParams p = MetricParams::make(n, k, s);
                std::vector<std::pair<double, std::string>> hs;
                for (double h : spec.h) {
                    std::ostringstream os;
                    os << h;
                    hs.emplace_back(h, os.str());
                }
                if (spec.add_thresholds) {
                    if ((s == Sign::Plus && p.gap() > 0) || (s == Sign::Minus && p.gap() < 0)) {
                        const double hs_ = critical_h(p);
                        hs.emplace_back(0.5 * hs_, "0.5h*");
                        hs.emplace_back(hs_, "h*");
                        hs.emplace_back(1.5 * hs_, "1.5h*");
                    }
                    if (p.gap() == 0) {
                        hs.emplace_back(0.5, "0.5");
                        hs.emplace_back(1.0, "1");
                        hs.emplace_back(1.5, "1.5");
                    }
                }
                for (Branch b : spec.branch) {
                    for (const auto& [h, label] : hs) {
                        SweepCell c;
                        c.params = p;
                        c.h = h;
                        c.branch = b;
                        c.h_label = label;
                        const bool needs_sign = s == Sign::Minus && p.gap() < 0 && b == Branch::Positive &&
                                                h >= critical_h(p) * (1.0 - kThresholdRelTol);
                        if (needs_sign) {
                            for (Sign x : {Sign::Minus, Sign::Zero, Sign::Plus}) {
                                c.xi_tt_sign = x;
                                cells.push_back(c);
                            }
                        } else {
                            cells.push_back(c);
                        }
                    }
                }
            }
        }
    }
    // duplicate h values (e.g. 0.5 listed twice when 2k = n) collapse to one cell
    std::vector<SweepCell> out;
    for (const auto& c : cells) {
        bool dup = false;
        for (const auto& o : out)
            if (o.params.n == c.params.n && o.params.k == c.params.k && o.params.s == c.params.s &&
                o.branch == c.branch && o.h == c.h && o.xi_tt_sign == c.xi_tt_sign)
                dup = true;
        if (!dup) out.push_back(c);
    }
    return out;
}

IntegrationConfig agreement_config(const EndpointBehavior& e, const MetricParams& p) {
    IntegrationConfig cfg;
    cfg.max_span = 40.0;
    switch (e.kind) {
    case EndpointKind::RoundSphereClosure:
    case EndpointKind::SmoothCenter:
        // xi ~ |t| here and the h error grows like e^{n xi}
        cfg.max_span = 28.0 / p.n;
        cfg.rel_tol = 1e-12;
        cfg.abs_tol = 1e-14;
        break;
    case EndpointKind::CylinderAsymptote: {
        // xi* is a saddle with rate lambda; arrive within e^{-8} before leaving
        const double xs = critical_xi(p);
        const double dx = 1e-4;
        const double lam2 = (rhs_w(xs + dx, 1.0, p) - rhs_w(xs - dx, 1.0, p)) / (2.0 * dx);
        cfg.max_span = 8.0 / std::sqrt(std::abs(lam2));
        break;
    }
    case EndpointKind::ConeIncomplete:
    case EndpointKind::ConicalDegeneracy: {
        // |xi_t| tends to |1 + exponent/2|; stay inside the overflow guard on xi
        const double slope = std::abs(1.0 + 0.5 * e.exponent);
        cfg.max_span = 45.0 / std::max(slope, 1.0);
        break;
    }
    default:
        break;
    }
    return cfg;
}

EndAgreement integrate_and_agree(const SolutionClass& cls, const LogState& start, const MetricParams& p) {
    const auto ends = oriented_endpoints(cls);
    const IntegrationConfig ci = agreement_config(ends[0], p);
    const IntegrationConfig co = agreement_config(ends[1], p);
    EndAgreement r;
    const Trajectory ti = integrate(start, p, ci);
    r.inner_end = ti.inner_end;
    r.drift = ti.scaled_drift;
    r.agreement = check_end(ends[0], ti.inner_end, true, ti, p);
    const bool same = ci.max_span == co.max_span && ci.rel_tol == co.rel_tol && ci.abs_tol == co.abs_tol;
    const Trajectory to = same ? ti : integrate(start, p, co);
    r.outer_end = to.outer_end;
    r.drift = std::max(r.drift, to.scaled_drift);
    if (r.agreement.ok) r.agreement = check_end(ends[1], to.outer_end, false, to, p);
    return r;
}

SweepResult run_cell(const SweepCell& cell, bool spot_integrate) {
    SweepResult r;
    r.cell = cell;
    try {
        r.cls = classify(cell.params, cell.h, cell.branch, cell.xi_tt_sign);
        r.admissible = true;
    } catch (const InadmissibleError& e) {
        r.error = e.what();
        return r;
    } catch (const Error& e) {
        r.error = e.what();
        return r;
    }
    if (!spot_integrate) return r;
    try {
        const LogState st = representative_state(cell.params, cell.h, cell.branch, cell.xi_tt_sign);
        const EndAgreement ea = integrate_and_agree(*r.cls, st, cell.params);
        r.integrated = true;
        r.inner_end = ea.inner_end;
        r.outer_end = ea.outer_end;
        r.drift = ea.drift;
        r.agreement = ea.agreement;
    } catch (const std::exception& e) {
        r.agreement.ok = false;
        r.agreement.why = std::string("integration failed: ") + e.what();
    }
    return r;
}

std::vector<SweepResult> run_sweep(const std::vector<SweepCell>& cells, unsigned threads, bool spot_integrate) {
    std::vector<SweepResult> out(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) out[i] = run_cell(cells[i], spot_integrate);
    };
    threads = std::max(1u, threads);
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    return out;
}

unsigned default_threads() {
    if (const char* env = std::getenv("SIGMAK_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

} // namespace sigmak
