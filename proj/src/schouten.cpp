#include "sigmak/schouten.hpp"

#include <cmath>
#include <string>

#include "sigmak/errors.hpp"

namespace sigmak {

namespace {

bool finite_jet(const RadialJet& j) {
    return std::isfinite(j.r) && std::isfinite(j.v) && std::isfinite(j.v_r) && std::isfinite(j.v_rr);
}

} // namespace

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double out = 1.0;
    for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
    return std::round(out);
}

MetricParams MetricParams::make(int n, int k, Sign s) {
    if (n < 3) throw ContractError("dimension n must be >= 3, got " + std::to_string(n));
    if (k < 1 || k > n)
        throw ContractError("order k must satisfy 1 <= k <= n, got k=" + std::to_string(k));
    MetricParams p;
    p.n = n;
    p.k = k;
    p.s = s;
    p.c_nk = binomial(n, k) / n; // (n-1)!/(k!(n-k)!) = binomial(n,k) / n
    p.cp_nk = cprime(n, k);
    return p;
}

double cprime(int n, int l) { return std::ldexp(binomial(n, l), 1 - l); }

double normalized_sigma(const MetricParams& p) {
    return p.sign() * std::ldexp(binomial(p.n, p.k), -p.k);
}

double normalization_shift(double c, const MetricParams& p) {
    if (!(c > 0.0)) throw DomainError("normalization constant must be positive");
    const double base = std::ldexp(binomial(p.n, p.k), -p.k);
    return std::log(c / base) / (2.0 * p.k);
}

EigenPair eigen_pair(const RadialJet& jet) {
    if (!finite_jet(jet)) throw DomainError("eigen_pair: non-finite jet");
    if (!(jet.r > 0.0) || !(jet.v > 0.0)) throw DomainError("eigen_pair: requires r > 0 and v > 0");
    const double a = jet.v_r / (jet.r * jet.v);
    EigenPair e;
    e.lambda = a * (1.0 - jet.r * jet.v_r / (2.0 * jet.v));
    e.mu = jet.v_rr / jet.v - a;
    return e;
}

double sigma_k_radial(const RadialJet& jet, const MetricParams& p) {
    const EigenPair e = eigen_pair(jet);
    return p.c_nk * std::pow(jet.v, 2 * p.k) * std::pow(e.lambda, p.k - 1) *
           (p.n * e.lambda + p.k * e.mu);
}

double sigma_l_from_w(double xi, double w, double xi_tt, int l, int n) {
    const double ln = static_cast<double>(l) / n;
    return cprime(n, l) * std::pow(w, l - 1) * (ln * xi_tt + (0.5 - ln) * w) * std::exp(2.0 * l * xi);
}

double sigma_l_log(const LogState& state, int l, const MetricParams& p) {
    if (!state.xi_tt) throw ContractError("sigma_l_log: state carries no xi_tt");
    if (l < 1 || l > p.k) throw ContractError("sigma_l_log: order l must satisfy 1 <= l <= k");
    const double w = 1.0 - state.xi_t * state.xi_t;
    return sigma_l_from_w(state.xi, w, *state.xi_tt, l, p.n);
}

LogState to_log(const RadialJet& jet) {
    if (!finite_jet(jet)) throw DomainError("to_log: non-finite jet");
    if (!(jet.r > 0.0) || !(jet.v > 0.0)) throw DomainError("to_log: requires r > 0 and v > 0");
    LogState s;
    s.t = std::log(jet.r);
    s.xi = std::log(jet.v / jet.r);
    s.xi_t = jet.r * jet.v_r / jet.v - 1.0;
    // v_rr = [xi_tt + xi_t (xi_t + 1)] v e^{-2t}
    s.xi_tt = jet.v_rr * jet.r * jet.r / jet.v - s.xi_t * (s.xi_t + 1.0);
    return s;
}

RadialJet from_log(const LogState& state) {
    RadialJet j;
    j.r = std::exp(state.t);
    j.v = std::exp(state.xi + state.t);
    j.v_r = std::exp(state.xi) * (state.xi_t + 1.0);
    const double xi_tt = state.xi_tt.value_or(0.0);
    j.v_rr = std::exp(state.xi - state.t) * (xi_tt + state.xi_t * (state.xi_t + 1.0));
    return j;
}

Branch branch_of(double xi_t) {
    const double w = 1.0 - xi_t * xi_t;
    if (w == 0.0 || std::abs(xi_t) == 1.0) throw BranchUndefinedError("branch undefined at |xi_t| = 1");
    return w > 0.0 ? Branch::Positive : Branch::Negative;
}

ConeClass cone_class(Branch branch, const MetricParams& p) {
    if (p.k < 2) throw ContractError("cone_class requires k >= 2");
    if (p.s == Sign::Zero) throw ContractError("cone_class requires a nonzero sigma_k sign");
    const bool even = p.k % 2 == 0;
    if (p.s == Sign::Plus && branch == Branch::Positive) return ConeClass::GammaPlusK;
    if (p.s == Sign::Plus && branch == Branch::Negative && even) return ConeClass::GammaMinusK;
    if (p.s == Sign::Minus && branch == Branch::Negative && !even) return ConeClass::GammaMinusK;
    return ConeClass::Indeterminate;
}

const char* to_string(ConeClass c) {
    switch (c) {
    case ConeClass::GammaPlusK: return "GammaPlusK";
    case ConeClass::GammaMinusK: return "GammaMinusK";
    case ConeClass::Indeterminate: return "Indeterminate";
    }
    return "Indeterminate";
}

const char* to_string(Sign s) {
    switch (s) {
    case Sign::Plus: return "+";
    case Sign::Minus: return "-";
    case Sign::Zero: return "0";
    }
    return "0";
}

} // namespace sigmak
