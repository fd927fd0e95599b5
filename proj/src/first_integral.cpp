#include "sigmak/first_integral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "sigmak/errors.hpp"
#include "sigmak/roots.hpp"

namespace sigmak {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << std::fixed << x;
    return os.str();
}

bool has_threshold(const MetricParams& p) {
    return (p.s == Sign::Plus && p.gap() > 0) || (p.s == Sign::Minus && p.gap() < 0);
}

// le_tol relaxes "h <= bound"; strict_tol makes "h < bound" fail within tolerance.
void check_impl(double h, Branch branch, const MetricParams& p, double le_tol, double strict_tol) {
    const bool even = p.k % 2 == 0;
    const double zero_tol = strict_tol > 0.0 ? 1e-12 : 0.0;
    auto fail = [](const std::string& what) { throw InadmissibleError(what); };
    if (p.s == Sign::Plus) {
        if (branch == Branch::Positive) {
            if (h > zero_tol && p.gap() > 0) {
                const double hs = critical_h(p);
                if (h > hs * (1.0 + le_tol))
                    fail("h exceeds h* ≈ " + fmt(hs) + " (Thm 1 Case I.3(a) requires h <= h*)");
            } else if (h > zero_tol && p.gap() == 0) {
                if (h >= 1.0 - strict_tol) fail("Thm 1 Case I.3(b) requires h<1");
            }
        } else if (!even) {
            if (h >= -zero_tol) fail("Thm 1 Case III requires h<0");
        }
    } else if (p.s == Sign::Minus) {
        if (branch == Branch::Positive) {
            if (h <= zero_tol) fail("Thm 2 Case I requires h>0");
        } else if (even) {
            if (h <= zero_tol) fail("Thm 2 Case III requires h>0");
        }
    }
}

double admissible_at(double xi, double h, Branch branch, const MetricParams& p) {
    const double d = profile_D(xi, h, p);
    if (branch == Branch::Positive) return (d > 0.0 && d <= 1.0) ? 1.0 : 0.0;
    if (p.k % 2 == 0) return d > 0.0 ? 1.0 : 0.0;
    return d < 0.0 ? 1.0 : 0.0;
}

} // namespace

double first_integral(double xi, double w, const MetricParams& p) {
    return std::exp((2.0 * p.k - p.n) * xi) * std::pow(w, p.k) - p.sign() * std::exp(-p.n * xi);
}

FirstIntegralValue conserved_h(const LogState& state, const MetricParams& p) {
    const Branch b = branch_of(state.xi_t);
    FirstIntegralValue out;
    out.h = first_integral(state.xi, 1.0 - state.xi_t * state.xi_t, p);
    out.branch = b;
    out.params = p;
    if (p.k >= 2 && p.s != Sign::Zero) check_impl(out.h, b, p, 1e-12, 0.0);
    return out;
}

double profile_D(double xi, double h, const MetricParams& p) {
    return p.sign() * std::exp(-2.0 * p.k * xi) + h * std::exp(p.gap() * xi);
}

double profile_D_prime(double xi, double h, const MetricParams& p) {
    return -2.0 * p.k * p.sign() * std::exp(-2.0 * p.k * xi) + h * p.gap() * std::exp(p.gap() * xi);
}

double critical_h(const MetricParams& p) {
    const double n = p.n;
    const double k2 = 2.0 * p.k;
    if (p.s == Sign::Plus && p.gap() > 0)
        return (k2 / (n - k2)) * std::pow((n - k2) / n, n / k2);
    if (p.s == Sign::Minus && p.gap() < 0)
        return (k2 / (k2 - n)) * std::pow((k2 - n) / n, n / k2);
    throw NoThresholdError("no critical h: requires (s=+1, 2k<n) or (s=-1, 2k>n)");
}

double critical_xi(const MetricParams& p) {
    if (!has_threshold(p)) throw NoThresholdError("no equilibrium: requires (s=+1, 2k<n) or (s=-1, 2k>n)");
    return std::log(static_cast<double>(p.n) / std::abs(p.gap())) / (2.0 * p.k);
}

double mass_M(double h, const MetricParams& p) {
    if (p.s != Sign::Minus || p.gap() >= 0) throw ContractError("mass_M requires s=-1 and 2k>n");
    if (!(h > 0.0)) throw DomainError("mass_M requires h>0; the supremum is only approached asymptotically");
    const double k2 = 2.0 * p.k;
    const double xi_max = std::log(k2 / ((k2 - p.n) * h)) / p.n;
    return h * std::exp(p.gap() * xi_max) - std::exp(-k2 * xi_max);
}

double exponent_window(const MetricParams& p) {
    return 700.0 / std::max(2 * p.k, p.n);
}

std::vector<double> profile_roots(double h, double target, const MetricParams& p) {
    const int s = p.sign();
    const double k2 = 2.0 * p.k;
    const double b = p.gap();
    std::vector<double> out;
    if (s == 0 && h == 0.0) return out;
    if (b == 0) {
        if (s == 0) return out;
        const double q = (target - h) / s;
        if (q > 0.0) out.push_back(-std::log(q) / k2);
        return out;
    }
    if (s == 0) {
        const double q = target / h;
        if (q > 0.0) out.push_back(std::log(q) / b);
        return out;
    }

    auto f = [&](double x) { return profile_D(x, h, p) - target; };
    auto df = [&](double x) { return profile_D_prime(x, h, p); };
    const double lim = exponent_window(p);

    // D' vanishes at most once: e^{-n xi_c} = h (n-2k) / (2k s).
    const double q = h * b / (k2 * s);
    std::vector<std::pair<double, double>> pieces; // (anchor, direction) searched outward
    if (q > 0.0) {
        const double xc = -std::log(q) / p.n;
        const double fc = f(xc);
        if (std::abs(fc) <= 1e-13 * std::max(1.0, std::abs(target))) {
            out.push_back(xc);
            return out;
        }
        pieces = {{xc, -1.0}, {xc, +1.0}};
    } else {
        pieces = {{0.0, -1.0}, {0.0, +1.0}};
    }

    for (auto [anchor, dir] : pieces) {
        const double fa = f(anchor);
        if (fa == 0.0) {
            if (dir > 0) out.push_back(anchor);
            continue;
        }
        double step = 0.5;
        double prev = anchor;
        while (true) {
            const double x = anchor + dir * step;
            if (std::abs(x) > lim) break;
            const double fx = f(x);
            if (std::isfinite(fx) && fx != 0.0 && (fx > 0) != (fa > 0)) {
                out.push_back(roots::bisect_newton(f, df, prev, x));
                break;
            }
            if (fx == 0.0) {
                out.push_back(x);
                break;
            }
            prev = x;
            step *= 2.0;
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<double> turning_points(double h, const MetricParams& p) { return profile_roots(h, 1.0, p); }
std::vector<double> null_points(double h, const MetricParams& p) { return profile_roots(h, 0.0, p); }

void check_admissible(double h, Branch branch, const MetricParams& p, double rel_tol) {
    check_impl(h, branch, p, rel_tol, rel_tol);
}

std::vector<XiInterval> admissible_intervals(double h, Branch branch, const MetricParams& p) {
    std::vector<double> bps = null_points(h, p);
    std::vector<double> tps;
    if (branch == Branch::Positive) {
        tps = turning_points(h, p);
        bps.insert(bps.end(), tps.begin(), tps.end());
    }
    std::sort(bps.begin(), bps.end());
    constexpr double inf = std::numeric_limits<double>::infinity();

    std::vector<XiInterval> segs;
    std::vector<bool> ok;
    if (bps.empty()) {
        segs.push_back({-inf, inf});
        ok.push_back(admissible_at(0.0, h, branch, p) > 0);
    } else {
        segs.push_back({-inf, bps.front()});
        ok.push_back(admissible_at(bps.front() - 1.0, h, branch, p) > 0);
        for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
            segs.push_back({bps[i], bps[i + 1]});
            ok.push_back(admissible_at(0.5 * (bps[i] + bps[i + 1]), h, branch, p) > 0);
        }
        segs.push_back({bps.back(), inf});
        ok.push_back(admissible_at(bps.back() + 1.0, h, branch, p) > 0);
    }

    std::vector<XiInterval> out;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (ok[i]) {
            if (!out.empty() && out.back().hi == segs[i].lo) out.back().hi = segs[i].hi;
            else out.push_back(segs[i]);
        } else if (i > 0 && !ok[i - 1]) {
            // isolated tangency point where D touches 1 from above
            const double x = segs[i].lo;
            if (std::find(tps.begin(), tps.end(), x) != tps.end()) out.push_back({x, x});
        }
    }
    return out;
}

double level_speed(double xi, double h, Branch branch, const MetricParams& p) {
    const double d = profile_D(xi, h, p);
    if (branch == Branch::Positive) {
        if (!(d > 0.0) || d > 1.0) return std::numeric_limits<double>::quiet_NaN();
        return std::sqrt(-std::expm1(std::log(d) / p.k));
    }
    const bool even = p.k % 2 == 0;
    if ((even && !(d > 0.0)) || (!even && !(d < 0.0))) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(1.0 + std::pow(std::abs(d), 1.0 / p.k));
}

} // namespace sigmak
