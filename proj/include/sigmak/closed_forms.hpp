#pragma once

// Exact radial solutions: the round sphere, the cylinder, the hyperbolic metric
// and the three sigma_k = 0 families. Each evaluates xi and its t-derivatives in
// closed form, and v and its r-derivatives directly where an elementary
// expression exists.

#include <string>
#include <utility>

#include "sigmak/schouten.hpp"

namespace sigmak {

enum class ClosedFamily { RoundSphere, Cylinder, Hyperbolic, FlatLinear, FlatSinh, FlatCosh };

const char* to_string(ClosedFamily f);

// Flat family selector; Linear is xi_t = +-1.
enum class FlatSelector { Linear, Sinh, Cosh };

const char* to_string(FlatSelector f);

struct ClosedForm {
    ClosedFamily family = ClosedFamily::RoundSphere;
    MetricParams params;
    double rho = 1.0;     // RoundSphere scale
    double xi_star = 0.0; // Cylinder level
    double r_plus = 1.0;  // Hyperbolic outer radius
    int sign = 1;         // FlatLinear slope; FlatSinh side of t0 (+1 means t > t0)
    double t0 = 0.0;
    double c = 0.0;

    // Rate 1 - n/2k of the sinh/cosh families.
    double beta() const;

    double xi(double t) const;
    double xi_t(double t) const;
    double xi_tt(double t) const;
    // 1 - xi_t^2 evaluated without cancellation near |xi_t| = 1.
    double w(double t) const;
    LogState state(double t) const;

    // Conformal factor and its radial derivatives.
    RadialJet jet(double r) const;

    // Open t-interval on which the evaluator is defined.
    std::pair<double, double> t_domain() const;

    std::string name() const;
};

ClosedForm round_sphere(double rho, const MetricParams& p);

// Requires h = h* within relative 1e-9.
ClosedForm cylinder(const MetricParams& p, double h);

// Requires h = 0 level with branch -1 and s = (-1)^k.
ClosedForm hyperbolic(const MetricParams& p, double r_plus = 1.0);

// side: slope sign for Linear, side of t0 for Sinh, ignored for Cosh.
ClosedForm flat_family(FlatSelector sel, double t0, double c, const MetricParams& p, int side = 1);

} // namespace sigmak
