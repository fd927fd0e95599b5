#pragma once

// Pointwise curvature algebra for radial conformal metrics g = v^{-2}(|x|)|dx|^2.
//
// The Schouten tensor of such a metric has eigenvalue lambda with multiplicity n-1
// and lambda + mu with multiplicity one, so every sigma_l reduces to a closed
// expression in (v, v_r, v_rr) or, after t = ln r and xi = ln(v/r), in
// (xi, xi_t, xi_tt).

#include <optional>

namespace sigmak {

enum class Sign : int { Minus = -1, Zero = 0, Plus = 1 };

// Sign of 1 - xi_t^2 along a solution.
enum class Branch : int { Negative = -1, Positive = 1 };

enum class ConeClass { GammaPlusK, GammaMinusK, Indeterminate };

inline int to_int(Sign s) { return static_cast<int>(s); }
inline int to_int(Branch b) { return static_cast<int>(b); }

double binomial(int n, int k);

struct MetricParams {
    int n = 3;
    int k = 1;
    Sign s = Sign::Plus;
    double c_nk = 0.0;  // (n-1)! / (k! (n-k)!)
    double cp_nk = 0.0; // 2^{1-k} binomial(n, k)

    // Validates 3 <= n, 1 <= k <= n and fills the binomial constants.
    static MetricParams make(int n, int k, Sign s);

    int sign() const { return to_int(s); }
    // n - 2k, the exponent governing the large-xi behaviour of the first integral.
    int gap() const { return n - 2 * k; }
};

// c'_{n,l} = 2^{1-l} binomial(n, l).
double cprime(int n, int l);

// The normalized constant value s * 2^{-k} binomial(n, k).
double normalized_sigma(const MetricParams& p);

// Translation of xi that carries a normalized solution to one with
// sigma_k = c (c > 0): xi -> xi + normalization_shift(c, p).
double normalization_shift(double c, const MetricParams& p);

struct RadialJet {
    double r = 1.0;
    double v = 1.0;
    double v_r = 0.0;
    double v_rr = 0.0;
};

struct EigenPair {
    double lambda = 0.0;
    double mu = 0.0;
};

struct LogState {
    double t = 0.0;
    double xi = 0.0;
    double xi_t = 0.0;
    std::optional<double> xi_tt;
};

EigenPair eigen_pair(const RadialJet& jet);

double sigma_k_radial(const RadialJet& jet, const MetricParams& p);

// sigma_l in log variables; requires state.xi_tt and 1 <= l <= p.k.
double sigma_l_log(const LogState& state, int l, const MetricParams& p);

// Same expression with w = 1 - xi_t^2 supplied directly. Used where w is known
// more accurately than 1 - xi_t*xi_t (near xi_t^2 = 1).
double sigma_l_from_w(double xi, double w, double xi_tt, int l, int n);

LogState to_log(const RadialJet& jet);
RadialJet from_log(const LogState& state);

// sign(1 - xi_t^2); throws BranchUndefinedError when |xi_t| == 1.
Branch branch_of(double xi_t);

ConeClass cone_class(Branch branch, const MetricParams& p);

const char* to_string(ConeClass c);
const char* to_string(Sign s);

} // namespace sigmak
