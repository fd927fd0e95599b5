#include "sigmak/classifier.hpp"

#include <cmath>
#include <sstream>

#include "sigmak/errors.hpp"
#include "sigmak/first_integral.hpp"
#include "sigmak/ode.hpp"

namespace sigmak {

namespace {

enum class Rel { Below, Equal, Above };

Rel compare(double h, double ref, double rel_tol) {
    if (std::abs(h - ref) <= rel_tol * std::abs(ref)) return Rel::Equal;
    return h < ref ? Rel::Below : Rel::Above;
}

int zero_sign(double h) {
    if (std::abs(h) <= kZeroTol) return 0;
    return h > 0 ? 1 : -1;
}

EndpointBehavior plain(EndpointKind k) {
    EndpointBehavior e;
    e.kind = k;
    return e;
}

EndpointBehavior blowup(int vr_limit, int k) {
    EndpointBehavior e = plain(EndpointKind::SecondDerivBlowup);
    e.vr_limit = vr_limit;
    e.exponent = -1.0 + 1.0 / k;
    return e;
}

EndpointBehavior cone_incomplete(double exponent) {
    EndpointBehavior e = plain(EndpointKind::ConeIncomplete);
    e.exponent = exponent;
    return e;
}

// sign -1 for 1 - xi_t^2 -> 0+ (positive branch), +1 for the negative branch.
EndpointBehavior ck_extension(const MetricParams& p, double h, int sign) {
    EndpointBehavior e = plain(EndpointKind::CkExtension);
    e.holder = 2.0 - static_cast<double>(p.n) / p.k;
    e.exponent = e.holder;
    e.coefficient = sign * std::pow(std::abs(h), 1.0 / p.k) * p.k / (2.0 * p.k - p.n);
    return e;
}

EndpointBehavior power_degeneracy(const MetricParams& p) {
    EndpointBehavior e = plain(EndpointKind::PowerDegeneracy);
    e.exponent = 4.0 * p.k / p.gap();
    return e;
}

EndpointBehavior conical(const MetricParams& p, double h) {
    EndpointBehavior e = plain(EndpointKind::ConicalDegeneracy);
    e.exponent = 2.0 * (std::sqrt(1.0 + std::pow(std::abs(h), 1.0 / p.k)) - 1.0);
    return e;
}

EndpointBehavior log_cusp(const MetricParams& p) {
    EndpointBehavior e = plain(EndpointKind::LogCuspComplete);
    e.exponent = -2.0;
    e.exponent2 = -2.0 / p.k;
    return e;
}

// Large-xi end of a negative-branch orbit, split by 2k vs n.
std::pair<EndpointBehavior, DomainType> far_end_negative(const MetricParams& p, double h) {
    if (p.gap() > 0) return {power_degeneracy(p), DomainType::Annulus};
    if (p.gap() == 0) return {conical(p, h), DomainType::PuncturedBall};
    return {ck_extension(p, h, +1), DomainType::PuncturedBall};
}

char split_letter(const MetricParams& p) { return p.gap() > 0 ? 'a' : p.gap() == 0 ? 'b' : 'c'; }
char split_digit(const MetricParams& p) { return p.gap() > 0 ? '1' : p.gap() == 0 ? '2' : '3'; }

SolutionClass make(std::string path, DomainType d, EndpointBehavior inner, EndpointBehavior outer, bool monotone) {
    SolutionClass c;
    c.case_path = std::move(path);
    c.domain = d;
    c.endpoints = {inner, outer};
    c.monotone = monotone;
    return c;
}

SolutionClass classify_plus(const MetricParams& p, double h, Branch branch) {
    const int k = p.k;
    const int hz = zero_sign(h);
    if (branch == Branch::Positive) {
        if (hz == 0) {
            auto c = make("Thm1.I.1", DomainType::FullSpace, plain(EndpointKind::RoundSphereClosure),
                          plain(EndpointKind::RoundSphereClosure), false);
            c.closed_form = ClosedFamily::RoundSphere;
            return c;
        }
        if (hz < 0) return make("Thm1.I.2", DomainType::Annulus, blowup(0, k), blowup(2, k), false);
        if (p.gap() > 0) {
            const Rel r = compare(h, critical_h(p), kThresholdRelTol);
            if (r == Rel::Above) check_admissible(h, branch, p, kThresholdRelTol);
            if (r == Rel::Equal) {
                auto c = make("Thm1.I.3a", DomainType::PuncturedSpace, plain(EndpointKind::CylinderExact),
                              plain(EndpointKind::CylinderExact), false);
                c.closed_form = ClosedFamily::Cylinder;
                return c;
            }
            return make("Thm1.I.3a", DomainType::PuncturedSpace, plain(EndpointKind::PeriodicComplete),
                        plain(EndpointKind::PeriodicComplete), false);
        }
        if (p.gap() == 0) {
            if (compare(h, 1.0, kThresholdRelTol) != Rel::Below) throw InadmissibleError("Thm 1 Case I.3(b) requires h<1");
            const double a = std::sqrt(1.0 - std::pow(h, 1.0 / k));
            return make("Thm1.I.3b", DomainType::PuncturedSpace, cone_incomplete(-2.0 * (1.0 - a)),
                        cone_incomplete(-2.0 * (1.0 + a)), false);
        }
        return make("Thm1.I.3c", DomainType::PuncturedSpace, ck_extension(p, h, -1), ck_extension(p, h, -1), false);
    }
    if (k % 2 == 0) {
        if (hz == 0) {
            auto c = make("Thm1.II.1", DomainType::Ball, plain(EndpointKind::SmoothCenter),
                          plain(EndpointKind::HyperbolicComplete), true);
            c.closed_form = ClosedFamily::Hyperbolic;
            return c;
        }
        if (hz < 0) return make("Thm1.II.2", DomainType::Annulus, blowup(0, k), plain(EndpointKind::LogComplete), true);
        auto [inner, dom] = far_end_negative(p, h);
        return make(std::string("Thm1.II.3") + split_letter(p), dom, inner, plain(EndpointKind::LogComplete), true);
    }
    if (hz >= 0) throw InadmissibleError("Thm 1 Case III requires h<0");
    auto [inner, dom] = far_end_negative(p, h);
    return make(std::string("Thm1.III.") + split_digit(p), dom, inner, blowup(0, k), true);
}

SolutionClass classify_minus(const MetricParams& p, double h, Branch branch, std::optional<Sign> xtt) {
    const int k = p.k;
    const int hz = zero_sign(h);
    if (branch == Branch::Positive) {
        if (hz <= 0) throw InadmissibleError("Thm 2 Case I requires h>0");
        if (p.gap() > 0) return make("Thm2.I.1", DomainType::Annulus, blowup(2, k), blowup(0, k), false);
        if (p.gap() == 0) {
            const Rel r = compare(h, 1.0, kThresholdRelTol);
            if (r == Rel::Below) {
                const double a = std::sqrt(1.0 - std::pow(h, 1.0 / k));
                return make("Thm2.I.2a", DomainType::PuncturedBall, cone_incomplete(-2.0 * (1.0 - a)), blowup(0, k),
                            true);
            }
            if (r == Rel::Equal) return make("Thm2.I.2b", DomainType::PuncturedBall, log_cusp(p), blowup(0, k), true);
            return make("Thm2.I.2c", DomainType::Annulus, blowup(2, k), blowup(0, k), false);
        }
        const Rel r = compare(h, critical_h(p), kThresholdRelTol);
        if (r == Rel::Below)
            return make("Thm2.I.3a", DomainType::PuncturedBall, ck_extension(p, h, -1), blowup(0, k), true);
        if (!xtt) throw ContractError("Thm 2 Case I.3 with h >= h* needs the sign of xi_tt");
        if (r == Rel::Equal) {
            if (*xtt == Sign::Minus)
                return make("Thm2.I.3b", DomainType::PuncturedBall, plain(EndpointKind::CylinderAsymptote),
                            blowup(0, k), true);
            if (*xtt == Sign::Plus)
                return make("Thm2.I.3c", DomainType::PuncturedSpace, ck_extension(p, h, -1),
                            plain(EndpointKind::CylinderAsymptote), true);
            auto c = make("Thm2.I.3d", DomainType::PuncturedSpace, plain(EndpointKind::CylinderExact),
                          plain(EndpointKind::CylinderExact), false);
            c.closed_form = ClosedFamily::Cylinder;
            return c;
        }
        if (*xtt == Sign::Minus) return make("Thm2.I.3e", DomainType::Annulus, blowup(2, k), blowup(0, k), false);
        if (*xtt == Sign::Plus)
            return make("Thm2.I.3f", DomainType::PuncturedSpace, ck_extension(p, h, -1), ck_extension(p, h, -1),
                        false);
        throw InadmissibleError("Thm 2 Case I.3: xi_tt = 0 identically requires h = h*");
    }
    if (k % 2 == 1) {
        if (hz == 0) {
            auto c = make("Thm2.II.1", DomainType::Ball, plain(EndpointKind::SmoothCenter),
                          plain(EndpointKind::HyperbolicComplete), true);
            c.closed_form = ClosedFamily::Hyperbolic;
            return c;
        }
        if (hz > 0) return make("Thm2.II.2", DomainType::Annulus, blowup(0, k), plain(EndpointKind::LogComplete), true);
        auto [inner, dom] = far_end_negative(p, h);
        return make(std::string("Thm2.II.3") + split_letter(p), dom, inner, plain(EndpointKind::LogComplete), true);
    }
    if (hz <= 0) throw InadmissibleError("Thm 2 Case III requires h>0");
    auto [inner, dom] = far_end_negative(p, h);
    return make(std::string("Thm2.III.") + split_digit(p), dom, inner, blowup(0, k), true);
}

EndpointBehavior mirrored(EndpointBehavior e) {
    if (e.kind == EndpointKind::SecondDerivBlowup) e.vr_limit = e.vr_limit == 0 ? 2 : 0;
    return e;
}

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

} // namespace

bool EndpointBehavior::operator==(const EndpointBehavior& o) const {
    return kind == o.kind && vr_limit == o.vr_limit && same(exponent, o.exponent) && same(exponent2, o.exponent2) &&
           same(holder, o.holder) && same(coefficient, o.coefficient);
}

const char* to_string(DomainType d) {
    switch (d) {
    case DomainType::FullSpace: return "FullSpace";
    case DomainType::PuncturedSpace: return "PuncturedSpace";
    case DomainType::Ball: return "Ball";
    case DomainType::PuncturedBall: return "PuncturedBall";
    case DomainType::Annulus: return "Annulus";
    }
    return "?";
}

const char* to_string(EndpointKind k) {
    switch (k) {
    case EndpointKind::RoundSphereClosure: return "RoundSphereClosure";
    case EndpointKind::SecondDerivBlowup: return "SecondDerivBlowup";
    case EndpointKind::PeriodicComplete: return "PeriodicComplete";
    case EndpointKind::ConeIncomplete: return "ConeIncomplete";
    case EndpointKind::CkExtension: return "CkExtension";
    case EndpointKind::HyperbolicComplete: return "HyperbolicComplete";
    case EndpointKind::LogComplete: return "LogComplete";
    case EndpointKind::PowerDegeneracy: return "PowerDegeneracy";
    case EndpointKind::ConicalDegeneracy: return "ConicalDegeneracy";
    case EndpointKind::CylinderAsymptote: return "CylinderAsymptote";
    case EndpointKind::CylinderExact: return "CylinderExact";
    case EndpointKind::LogCuspComplete: return "LogCuspComplete";
    case EndpointKind::SmoothCenter: return "SmoothCenter";
    case EndpointKind::Unclassified: return "Unclassified";
    }
    return "?";
}

std::array<EndpointBehavior, 2> oriented_endpoints(const SolutionClass& c) {
    if (!c.inversion_applied) return c.endpoints;
    return {mirrored(c.endpoints[1]), mirrored(c.endpoints[0])};
}

SolutionClass classify(const MetricParams& p, double h, Branch branch, std::optional<Sign> xi_tt_sign) {
    if (p.k < 2) throw ContractError("classify requires k >= 2");
    if (p.s == Sign::Zero) throw ContractError("classify requires s = +-1; use classify_flat for s = 0");
    if (!std::isfinite(h)) throw DomainError("classify: h must be finite");
    SolutionClass c = p.s == Sign::Plus ? classify_plus(p, h, branch) : classify_minus(p, h, branch, xi_tt_sign);
    c.cone = cone_class(branch, p);
    return c;
}

SolutionClass classify_flat(const MetricParams& p, FlatSelector family) {
    if (p.s != Sign::Zero) throw ContractError("classify_flat requires s = 0");
    if (family != FlatSelector::Linear && 2 * p.k == p.n)
        throw ContractError("2k = n makes the sinh/cosh coefficient degenerate");
    SolutionClass c;
    switch (family) {
    case FlatSelector::Linear:
        c.case_path = "Thm3.1";
        c.closed_form = ClosedFamily::FlatLinear;
        c.domain = DomainType::PuncturedSpace;
        break;
    case FlatSelector::Sinh:
        c.case_path = "Thm3.2";
        c.closed_form = ClosedFamily::FlatSinh;
        c.domain = DomainType::PuncturedBall;
        break;
    case FlatSelector::Cosh:
        c.case_path = "Thm3.3";
        c.closed_form = ClosedFamily::FlatCosh;
        c.domain = DomainType::PuncturedSpace;
        break;
    }
    c.endpoints = {plain(EndpointKind::Unclassified), plain(EndpointKind::Unclassified)};
    c.cone = ConeClass::Indeterminate;
    return c;
}

Sign xi_tt_sign(const LogState& state, const MetricParams& p) {
    const double a = rhs(state, p);
    if (std::abs(a) <= 1e-12) return Sign::Zero;
    return a > 0 ? Sign::Plus : Sign::Minus;
}

SolutionClass classify_state(const LogState& state, const MetricParams& p) {
    const FirstIntegralValue fv = conserved_h(state, p);
    std::optional<Sign> xtt;
    if (p.s == Sign::Minus && p.gap() < 0 && fv.branch == Branch::Positive) {
        xtt = xi_tt_sign(state, p);
        // sign(xi_tt) on the positive branch is sign(-D'), fixed by xi vs the maximiser of D
        if (*xtt != Sign::Zero || std::abs(state.xi_t) > 1e-12) {
            const double k2 = 2.0 * p.k;
            const double xi_max = std::log(k2 / ((k2 - p.n) * fv.h)) / p.n;
            if (std::abs(state.xi - xi_max) > 1e-12 * (1.0 + std::abs(xi_max)))
                xtt = state.xi < xi_max ? Sign::Minus : Sign::Plus;
        }
    }
    SolutionClass c = classify(p, fv.h, fv.branch, xtt);
    c.inversion_applied = c.monotone && state.xi_t > 0;
    return c;
}

std::pair<AsymptoticTemplate, AsymptoticTemplate> endpoint_asymptotics(const SolutionClass& c, double h,
                                                                       const MetricParams& p) {
    auto fmt = [](double x) {
        std::ostringstream os;
        os.precision(6);
        os << x;
        return os.str();
    };
    auto one = [&](const EndpointBehavior& e, bool inner) {
        AsymptoticTemplate a;
        a.kind = e.kind;
        a.exponent = e.exponent;
        a.exponent2 = e.exponent2;
        a.coefficient = e.coefficient;
        const bool finite_inner = c.domain == DomainType::Annulus;
        const bool finite_outer = c.domain == DomainType::Ball || c.domain == DomainType::PuncturedBall ||
                                  c.domain == DomainType::Annulus;
        a.location = inner ? (finite_inner ? "r->r_minus" : "r->0") : (finite_outer ? "r->r_plus" : "r->inf");
        switch (e.kind) {
        case EndpointKind::SecondDerivBlowup:
            a.location = "r->r_star";
            a.law = std::string("|v_rr| ~ |r - r_star|^(") + fmt(e.exponent) + "), " +
                    (e.vr_limit == 0 ? "v_r -> 0" : "r v_r / v -> 2");
            break;
        case EndpointKind::RoundSphereClosure:
            a.exponent = inner ? 0.0 : -4.0;
            a.law = "v^-2 = (2 rho / (r^2 + rho^2))^2";
            break;
        case EndpointKind::PeriodicComplete:
            a.law = "xi(t) periodic in t = ln r with period T";
            if (p.s == Sign::Plus && p.gap() > 0 && h > 0 && h < critical_h(p)) a.coefficient = period(h, p);
            break;
        case EndpointKind::ConeIncomplete:
            a.law = std::string("g ~ |x|^(") + fmt(e.exponent) + ") |dx|^2";
            break;
        case EndpointKind::CkExtension:
            a.law = std::string("rho^2 v^-2 = 1 + (") + fmt(e.coefficient) + ") s^(" + fmt(e.holder) +
                    ") + ..., s = " + (inner ? "r/rho" : "rho/r");
            break;
        case EndpointKind::HyperbolicComplete:
            a.exponent = -2.0;
            a.law = "v^-2 ~ (r_plus - r)^-2";
            break;
        case EndpointKind::LogComplete:
            a.exponent = -2.0;
            a.law = "g ~ (ln(r_plus/|x|))^-2 |dx|^2";
            break;
        case EndpointKind::PowerDegeneracy:
            a.law = std::string("g ~ (r - r_minus)^(") + fmt(e.exponent) + ") |dx|^2";
            break;
        case EndpointKind::ConicalDegeneracy:
            a.law = std::string("g ~ |x|^(") + fmt(e.exponent) + ") |dx|^2";
            break;
        case EndpointKind::CylinderAsymptote:
        case EndpointKind::CylinderExact:
            a.exponent = -2.0;
            a.coefficient = std::exp(-2.0 * critical_xi(p));
            a.law = std::string(e.kind == EndpointKind::CylinderExact ? "g = " : "g -> ") + fmt(a.coefficient) +
                    " |x|^-2 |dx|^2";
            break;
        case EndpointKind::LogCuspComplete:
            a.law = std::string("v^-2 ~ |x|^-2 (ln 1/|x|)^(") + fmt(e.exponent2) + ")";
            break;
        case EndpointKind::SmoothCenter:
            a.exponent = 0.0;
            a.law = "v^-2 -> const > 0, smooth at r = 0";
            break;
        case EndpointKind::Unclassified:
            a.law = "no endpoint statement";
            break;
        }
        return a;
    };
    return {one(c.endpoints[0], true), one(c.endpoints[1], false)};
}

LogState representative_state(const MetricParams& p, double h, Branch branch, std::optional<Sign> xtt) {
    const SolutionClass c = classify(p, h, branch, xtt);
    LogState st;
    st.t = 0.0;
    if (c.closed_form == ClosedFamily::Cylinder) {
        st.xi = critical_xi(p);
        st.xi_t = 0.0;
        st.xi_tt = 0.0;
        return st;
    }
    // Route threshold values exactly onto the tangency.
    double hh = h;
    if (zero_sign(h) == 0) hh = 0.0;
    const auto ivs = admissible_intervals(hh, branch, p);
    if (ivs.empty()) throw InadmissibleError("empty level set");
    const auto tps = branch == Branch::Positive ? turning_points(hh, p) : std::vector<double>{};

    XiInterval iv = ivs.front();
    if (c.case_path == "Thm2.I.3b" || c.case_path == "Thm2.I.3c") {
        // tangency at xi*: the two half-orbits share one merged interval
        const double xs = critical_xi(p);
        st.xi = c.case_path == "Thm2.I.3b" ? 0.5 * (iv.lo + xs) : xs + 1.0;
        st.xi_t = -level_speed(st.xi, hh, branch, p);
        st.xi_tt = rhs(st, p);
        return st;
    }
    if (ivs.size() > 1) {
        // Thm 2 I.3(e/f): xi_tt < 0 exactly on the lower interval
        const bool want_low = xtt && *xtt == Sign::Minus;
        iv = want_low ? ivs.front() : ivs.back();
    }
    for (double z : tps) {
        if (z == iv.lo || z == iv.hi) {
            st.xi = z;
            st.xi_t = 0.0;
            st.xi_tt = rhs_w(z, 1.0, p);
            return st;
        }
    }
    double x;
    if (std::isfinite(iv.lo) && std::isfinite(iv.hi)) x = 0.5 * (iv.lo + iv.hi);
    else if (std::isfinite(iv.lo)) x = iv.lo + 1.0;
    else if (std::isfinite(iv.hi)) x = iv.hi - 1.0;
    else x = 0.0;
    st.xi = x;
    st.xi_t = -level_speed(x, hh, branch, p);
    st.xi_tt = rhs(st, p);
    return st;
}

} // namespace sigmak
