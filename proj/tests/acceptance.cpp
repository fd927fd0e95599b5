// One line per acceptance criterion; exit status 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "sigmak/verify.hpp"

using namespace sigmak::verify;

int main() {
    const Options o;
    struct Criterion {
        const char* label;
        std::function<CheckResult(const Options&)> run;
    };
    const std::vector<Criterion> criteria = {
        {"1 normalization", normalization},
        {"2 first-integral conservation", conservation},
        {"3 threshold values", thresholds},
        {"4 oracle equivalence", oracle_equivalence},
        {"5 periodicity", periodicity},
        {"6 blow-up exponent", blowup},
        {"7 endpoint exponents", endpoint_exponents},
        {"8 sigma_k = 0 families", flat_families},
        {"9 cone membership", cone_membership},
        {"10 classification", classification},
        {"extra closed-form reproduction", closed_form_reproduction},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        CheckResult r;
        try {
            r = c.run(o);
        } catch (const std::exception& e) {
            r.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !r.passed;
        std::printf("criterion %s: %s  metric=%.4g tol=%.4g  (%.2fs)  %s\n", c.label, r.passed ? "PASS" : "FAIL",
                    r.metric, r.tolerance, secs, r.detail.c_str());
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
