#pragma once

// Numerical verification checks shared by the `verify` command and the
// acceptance binary. Each check returns a named verdict with the measured
// figure of merit.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sigmak::verify {

struct Options {
    std::uint64_t seed = 42;
    // Multiplies every acceptance tolerance; values << 1 force failures
    // (negative control for the harness itself).
    double tolerance_scale = 1.0;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    double metric = 0.0;   // worst measured deviation
    double tolerance = 0.0;
    std::string detail;
};

CheckResult normalization(const Options& o);        // round-sphere sigma_k value
CheckResult conservation(const Options& o);         // randomized drift
CheckResult thresholds(const Options& o);           // h* by formula and by independent search
CheckResult oracle_equivalence(const Options& o);   // quadrature vs integration
CheckResult periodicity(const Options& o);          // return map and period
CheckResult blowup(const Options& o);               // null-point rate and side
CheckResult endpoint_exponents(const Options& o);   // hyperbolic, power, conical, C^alpha
CheckResult flat_families(const Options& o);       // sigma_k = 0 residuals
CheckResult cone_membership(const Options& o);      // sign pattern of sigma_l, monotone v
CheckResult classification(const Options& o);       // coverage, representatives, rejections
CheckResult closed_form_reproduction(const Options& o);

// Suite names: all, conservation, closed-forms, exponents, classification.
std::vector<CheckResult> run_suite(const std::string& suite, const Options& o);
const std::vector<std::string>& suite_names();

double least_squares_slope(std::span<const double> x, std::span<const double> y);

} // namespace sigmak::verify
