#pragma once

// The conserved quantity of the reduced radial equation and the profile
// D(xi) = s e^{-2k xi} + h e^{(n-2k) xi} that satisfies (1 - xi_t^2)^k = D(xi)
// along each solution.

#include <limits>
#include <vector>

#include "sigmak/schouten.hpp"

namespace sigmak {

struct FirstIntegralValue {
    double h = 0.0;
    Branch branch = Branch::Positive;
    MetricParams params;
};

// h written with w = 1 - xi_t^2: e^{(2k-n) xi} w^k - s e^{-n xi}.
double first_integral(double xi, double w, const MetricParams& p);

// Throws BranchUndefinedError at |xi_t| = 1 and InadmissibleError if the value
// violates a case constraint beyond round-off.
FirstIntegralValue conserved_h(const LogState& state, const MetricParams& p);

double profile_D(double xi, double h, const MetricParams& p);
double profile_D_prime(double xi, double h, const MetricParams& p);

// Threshold h*; NoThresholdError unless (s=+1, 2k<n) or (s=-1, 2k>n).
double critical_h(const MetricParams& p);

// Location of the equilibrium xi* (xi_t = 0, xi_tt = 0) at h = h*.
double critical_xi(const MetricParams& p);

// max over xi of h e^{(n-2k) xi} - e^{-2k xi}; requires s=-1, 2k>n, h>0.
double mass_M(double h, const MetricParams& p);

// Roots of D = 1 and D = 0, ascending. A tangency contributes a single entry.
std::vector<double> turning_points(double h, const MetricParams& p);
std::vector<double> null_points(double h, const MetricParams& p);
std::vector<double> profile_roots(double h, double target, const MetricParams& p);

// Throws InadmissibleError naming the violated constraint when no solution with
// this (h, branch) exists. `rel_tol` is applied to comparisons against h* and 1.
void check_admissible(double h, Branch branch, const MetricParams& p, double rel_tol = 1e-9);

struct XiInterval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

// Maximal xi-intervals on which the level set {h, branch} has real points.
std::vector<XiInterval> admissible_intervals(double h, Branch branch, const MetricParams& p);

// |xi_t| on the level set at xi; NaN where the level set has no point.
double level_speed(double xi, double h, Branch branch, const MetricParams& p);

// Largest |xi| for which the exponentials in D stay representable.
double exponent_window(const MetricParams& p);

} // namespace sigmak
