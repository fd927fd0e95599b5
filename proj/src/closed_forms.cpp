#include "sigmak/closed_forms.hpp"

#include <cmath>
#include <limits>

#include "sigmak/errors.hpp"
#include "sigmak/first_integral.hpp"

namespace sigmak {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double coth(double x) { return 1.0 / std::tanh(x); }
double csch2(double x) {
    const double s = std::sinh(x);
    return 1.0 / (s * s);
}
double sech2(double x) {
    const double c = std::cosh(x);
    return 1.0 / (c * c);
}
// ln sinh x for x > 0, stable for large x.
double log_sinh(double x) { return x + std::log1p(-std::exp(-2.0 * x)) - std::log(2.0); }
double log_cosh(double x) {
    const double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}
} // namespace

const char* to_string(ClosedFamily f) {
    switch (f) {
    case ClosedFamily::RoundSphere: return "RoundSphere";
    case ClosedFamily::Cylinder: return "Cylinder";
    case ClosedFamily::Hyperbolic: return "Hyperbolic";
    case ClosedFamily::FlatLinear: return "FlatLinear";
    case ClosedFamily::FlatSinh: return "FlatSinh";
    case ClosedFamily::FlatCosh: return "FlatCosh";
    }
    return "?";
}

const char* to_string(FlatSelector f) {
    switch (f) {
    case FlatSelector::Linear: return "linear";
    case FlatSelector::Sinh: return "sinh";
    case FlatSelector::Cosh: return "cosh";
    }
    return "?";
}

double ClosedForm::beta() const { return 1.0 - static_cast<double>(params.n) / (2.0 * params.k); }

double ClosedForm::xi(double t) const {
    switch (family) {
    case ClosedFamily::RoundSphere: return log_cosh(t - std::log(rho));
    case ClosedFamily::Cylinder: return xi_star;
    case ClosedFamily::Hyperbolic: return log_sinh(std::log(r_plus) - t);
    case ClosedFamily::FlatLinear: return sign * t + c;
    case ClosedFamily::FlatSinh: {
        const double b = beta();
        return log_sinh(std::abs(b * (t - t0))) / b + c;
    }
    case ClosedFamily::FlatCosh: {
        const double b = beta();
        return log_cosh(b * (t - t0)) / b + c;
    }
    }
    return 0.0;
}

double ClosedForm::xi_t(double t) const {
    switch (family) {
    case ClosedFamily::RoundSphere: return std::tanh(t - std::log(rho));
    case ClosedFamily::Cylinder: return 0.0;
    case ClosedFamily::Hyperbolic: return -coth(std::log(r_plus) - t);
    case ClosedFamily::FlatLinear: return sign;
    case ClosedFamily::FlatSinh: return coth(beta() * (t - t0));
    case ClosedFamily::FlatCosh: return std::tanh(beta() * (t - t0));
    }
    return 0.0;
}

double ClosedForm::xi_tt(double t) const {
    switch (family) {
    case ClosedFamily::RoundSphere: return sech2(t - std::log(rho));
    case ClosedFamily::Cylinder: return 0.0;
    case ClosedFamily::Hyperbolic: return -csch2(std::log(r_plus) - t);
    case ClosedFamily::FlatLinear: return 0.0;
    case ClosedFamily::FlatSinh: return -beta() * csch2(beta() * (t - t0));
    case ClosedFamily::FlatCosh: return beta() * sech2(beta() * (t - t0));
    }
    return 0.0;
}

double ClosedForm::w(double t) const {
    switch (family) {
    case ClosedFamily::RoundSphere: return sech2(t - std::log(rho));
    case ClosedFamily::Cylinder: return 1.0;
    case ClosedFamily::Hyperbolic: return -csch2(std::log(r_plus) - t);
    case ClosedFamily::FlatLinear: return 0.0;
    case ClosedFamily::FlatSinh: return -csch2(beta() * (t - t0));
    case ClosedFamily::FlatCosh: return sech2(beta() * (t - t0));
    }
    return 0.0;
}

LogState ClosedForm::state(double t) const {
    LogState s;
    s.t = t;
    s.xi = xi(t);
    s.xi_t = xi_t(t);
    s.xi_tt = xi_tt(t);
    return s;
}

RadialJet ClosedForm::jet(double r) const {
    if (!(r > 0.0)) throw DomainError("closed form: r must be positive");
    RadialJet j;
    j.r = r;
    switch (family) {
    case ClosedFamily::RoundSphere:
        j.v = (r * r + rho * rho) / (2.0 * rho);
        j.v_r = r / rho;
        j.v_rr = 1.0 / rho;
        return j;
    case ClosedFamily::Cylinder:
        j.v = std::exp(xi_star) * r;
        j.v_r = std::exp(xi_star);
        j.v_rr = 0.0;
        return j;
    case ClosedFamily::Hyperbolic:
        if (r >= r_plus) throw DomainError("hyperbolic closed form: r must be below r_plus");
        j.v = (r_plus * r_plus - r * r) / (2.0 * r_plus);
        j.v_r = -r / r_plus;
        j.v_rr = -1.0 / r_plus;
        return j;
    default:
        return from_log(state(std::log(r)));
    }
}

std::pair<double, double> ClosedForm::t_domain() const {
    switch (family) {
    case ClosedFamily::Hyperbolic: return {-kInf, std::log(r_plus)};
    case ClosedFamily::FlatSinh: {
        // the argument beta (t - t0) keeps one sign on each side of t0
        return sign > 0 ? std::pair{t0, kInf} : std::pair{-kInf, t0};
    }
    default: return {-kInf, kInf};
    }
}

std::string ClosedForm::name() const { return to_string(family); }

ClosedForm round_sphere(double rho, const MetricParams& p) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("round_sphere: rho must be positive");
    ClosedForm f;
    f.family = ClosedFamily::RoundSphere;
    f.params = p;
    f.rho = rho;
    return f;
}

ClosedForm cylinder(const MetricParams& p, double h) {
    const double hs = critical_h(p);
    if (std::abs(h - hs) > 1e-9 * std::abs(hs)) throw DomainError("cylinder: h must equal h*");
    ClosedForm f;
    f.family = ClosedFamily::Cylinder;
    f.params = p;
    f.xi_star = critical_xi(p);
    return f;
}

ClosedForm hyperbolic(const MetricParams& p, double r_plus) {
    if (p.k < 2) throw ContractError("hyperbolic: requires k >= 2");
    const int parity = p.k % 2 == 0 ? 1 : -1;
    if (p.sign() != parity) throw ContractError("hyperbolic: requires s = +1 for even k and s = -1 for odd k");
    if (!(r_plus > 0.0)) throw DomainError("hyperbolic: r_plus must be positive");
    ClosedForm f;
    f.family = ClosedFamily::Hyperbolic;
    f.params = p;
    f.r_plus = r_plus;
    return f;
}

ClosedForm flat_family(FlatSelector sel, double t0, double c, const MetricParams& p, int side) {
    if (p.s != Sign::Zero) throw ContractError("flat_family: requires s = 0");
    if (sel != FlatSelector::Linear && 2 * p.k == p.n)
        throw ContractError("flat_family: 2k = n makes the sinh/cosh coefficient degenerate");
    ClosedForm f;
    f.params = p;
    f.t0 = t0;
    f.c = c;
    f.sign = side >= 0 ? 1 : -1;
    f.family = sel == FlatSelector::Linear ? ClosedFamily::FlatLinear
               : sel == FlatSelector::Sinh ? ClosedFamily::FlatSinh
                                           : ClosedFamily::FlatCosh;
    return f;
}

} // namespace sigmak
