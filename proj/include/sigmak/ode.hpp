#pragma once

// Integration of the reduced radial equation in the (xi, xi_t) phase plane.
//
// Two charts are used. Away from xi_t^2 = 1 the state (xi, xi_t) is advanced in
// t. Near xi_t^2 = 1, and everywhere on the branch 1 - xi_t^2 < 0, the state is
// (t, V) advanced in xi, where V = e^{2k xi} (1 - xi_t^2)^k - s obeys the regular
// linear equation dV/dxi = n V and dt/dxi = 1/xi_t. The t-chart
// is regular at turning points (xi_t = 0); the xi-chart is regular at null
// points (xi_t^2 = 1), where v_rr blows up in finite t.

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sigmak/errors.hpp"
#include "sigmak/first_integral.hpp"
#include "sigmak/schouten.hpp"

namespace sigmak {

struct IntegrationConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.25;
    // Null points are accepted once |1 - xi_t^2| falls below this; the last
    // fraction is closed by linear extrapolation of W in xi.
    double event_epsilon = 1e-10;
    double max_span = 50.0;
    // |xi_t| thresholds for entering / leaving the xi-chart on the positive branch.
    double chart_enter = 0.95;
    double chart_exit = 0.9;
    // Window in xi; NaN selects +-min(60, exponent_window(params)).
    double xi_lower = std::numeric_limits<double>::quiet_NaN();
    double xi_upper = std::numeric_limits<double>::quiet_NaN();
    long max_steps = 2'000'000;
};

enum class EventKind { NullPoint, TurningPoint, Equilibrium, SpanExhausted, Escape };

const char* to_string(EventKind k);

struct EventRecord {
    EventKind kind = EventKind::SpanExhausted;
    double t = 0.0;
    double xi = 0.0;
    double xi_t = 0.0;
    // NullPoint: limiting value of xi_t (+1 means r v_r / v -> 2, -1 means v_r -> 0).
    // Escape: direction of xi (+1 upper window edge, -1 lower).
    int side = 0;
};

struct TrajectorySample {
    LogState state; // xi_tt always present
    double w = 0.0; // 1 - xi_t^2, carried exactly in the xi-chart
};

struct Trajectory {
    std::vector<TrajectorySample> samples; // t strictly increasing
    std::vector<EventRecord> events;       // in increasing t
    EventRecord inner_end;                 // terminal event of the backward pass
    EventRecord outer_end;                 // terminal event of the forward pass
    FirstIntegralValue h0;
    double drift = 0.0;
    // max |h - h0| / max(1, e^{(2k-n) xi} |w|^k + e^{-n xi}); h cancels terms of
    // that size, so this is the drift relative to its conditioning.
    double scaled_drift = 0.0;
    MetricParams params;
};

struct IntegrationError : Error {
    IntegrationError(const std::string& what, LogState last) : Error(what), last_good(last) {}
    LogState last_good;
};

// xi_tt from the reduced equation; throws at |xi_t| = 1.
double rhs(const LogState& state, const MetricParams& p);
// Same with w = 1 - xi_t^2 given; NaN-propagating, no checks.
double rhs_w(double xi, double w, const MetricParams& p);

Trajectory integrate(const LogState& initial, const MetricParams& p, const IntegrationConfig& cfg = {});

// Resolved xi window for (params, cfg).
std::pair<double, double> xi_window(const MetricParams& p, const IntegrationConfig& cfg);

// Elapsed t between xi_from and xi_to along the level set (h, branch), with
// direction_sign = sign(xi_t) on the segment: t(xi_to) - t(xi_from).
double time_quadrature(double xi_from, double xi_to, double h, const MetricParams& p, Branch branch,
                       int direction_sign);

// Period of the closed orbits (s=+1, branch +1, 2k<n, 0<h<h*).
double period(double h, const MetricParams& p);

double drift_report(const Trajectory& traj);
double scaled_drift_report(const Trajectory& traj);

// States approaching a null point at xi* + offset for each |offset| in deltas,
// integrated in the xi-chart out of the event itself. Offsets point into the
// admissible side.
struct ApproachSample {
    double delta = 0.0; // |xi - xi*|
    double dt = 0.0;    // t - t*
    TrajectorySample sample;
};
std::vector<ApproachSample> null_approach(const EventRecord& null_event, Branch branch, const MetricParams& p,
                                          std::span<const double> deltas, const IntegrationConfig& cfg = {});

} // namespace sigmak
