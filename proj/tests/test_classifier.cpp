#include <doctest.h>

#include <cmath>
#include <set>

#include "sigmak/classifier.hpp"
#include "sigmak/errors.hpp"
#include "sigmak/first_integral.hpp"
#include "sigmak/ode.hpp"
#include "sigmak/sweep.hpp"

using namespace sigmak;

namespace {
MetricParams P(int n, int k, Sign s) { return MetricParams::make(n, k, s); }
constexpr auto Pos = Branch::Positive;
constexpr auto Neg = Branch::Negative;
} // namespace

TEST_CASE("classify: representative leaves") {
    auto c = classify(P(5, 2, Sign::Plus), 0.0, Pos);
    CHECK(c.case_path == "Thm1.I.1");
    CHECK(c.domain == DomainType::FullSpace);
    CHECK(c.endpoints[0].kind == EndpointKind::RoundSphereClosure);
    CHECK(c.endpoints[1].kind == EndpointKind::RoundSphereClosure);
    CHECK(c.cone == ConeClass::GammaPlusK);
    CHECK(c.closed_form == ClosedFamily::RoundSphere);

    c = classify(P(5, 2, Sign::Plus), 0.3, Pos);
    CHECK(c.case_path == "Thm1.I.3a");
    CHECK(c.domain == DomainType::PuncturedSpace);
    CHECK(c.endpoints[0].kind == EndpointKind::PeriodicComplete);
    CHECK(c.endpoints[1].kind == EndpointKind::PeriodicComplete);

    c = classify(P(4, 2, Sign::Plus), 0.5, Pos);
    CHECK(c.case_path == "Thm1.I.3b");
    CHECK(c.domain == DomainType::PuncturedSpace);
    REQUIRE(c.endpoints[0].kind == EndpointKind::ConeIncomplete);
    REQUIRE(c.endpoints[1].kind == EndpointKind::ConeIncomplete);
    const double q = std::sqrt(1 - std::sqrt(0.5));
    const std::set<double> got{c.endpoints[0].exponent, c.endpoints[1].exponent};
    CHECK(*got.begin() == doctest::Approx(-2 * (1 + q)));
    CHECK(*got.rbegin() == doctest::Approx(-2 * (1 - q)));

    // Thm 1 Case III needs k odd
    c = classify(P(5, 3, Sign::Plus), -1.0, Neg);
    CHECK(c.case_path == "Thm1.III.3");
    CHECK(c.domain == DomainType::PuncturedBall);
    CHECK(c.endpoints[0].kind == EndpointKind::CkExtension);
    CHECK(c.endpoints[0].holder == doctest::Approx(1.0 / 3));
    CHECK(c.endpoints[1].kind == EndpointKind::SecondDerivBlowup);

    const auto m = P(3, 2, Sign::Minus);
    c = classify(m, critical_h(m), Pos, Sign::Zero);
    CHECK(c.case_path == "Thm2.I.3d");
    CHECK(c.domain == DomainType::PuncturedSpace);
    CHECK(c.endpoints[0].kind == EndpointKind::CylinderExact);
    CHECK(c.closed_form == ClosedFamily::Cylinder);
    // threshold snap within the relative tolerance
    CHECK(classify(m, critical_h(m) * (1 + 1e-10), Pos, Sign::Zero).case_path == "Thm2.I.3d");
    CHECK_THROWS_AS(classify(m, critical_h(m) * (1 + 1e-6), Pos, Sign::Zero), InadmissibleError);
}

TEST_CASE("classify: rejections name the violated constraint") {
    auto msg = [](auto&& f) {
        try {
            f();
        } catch (const InadmissibleError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(msg([] { classify(P(3, 3, Sign::Plus), 0.0, Neg); }).find("Thm 1 Case III requires h<0") != std::string::npos);
    CHECK(msg([] { classify(P(5, 3, Sign::Plus), 1.0, Neg); }).find("Thm 1 Case III requires h<0") != std::string::npos);
    CHECK(msg([] { classify(P(5, 2, Sign::Plus), 0.6, Pos); }).find("h*") != std::string::npos);
    CHECK(msg([] { classify(P(3, 2, Sign::Minus), -1.0, Pos); }).find("Thm 2 Case I requires h>0") != std::string::npos);
    CHECK_THROWS_AS(classify(P(3, 2, Sign::Minus), 2.0, Pos), ContractError); // xi_tt sign needed
    CHECK_THROWS_AS(classify(P(5, 1, Sign::Plus), 0.0, Pos), ContractError);
    CHECK_THROWS_AS(classify(P(5, 2, Sign::Zero), 0.0, Pos), ContractError);
}

TEST_CASE("classify_flat") {
    auto c = classify_flat(P(5, 2, Sign::Zero), FlatSelector::Linear);
    CHECK(c.closed_form == ClosedFamily::FlatLinear);
    c = classify_flat(P(5, 2, Sign::Zero), FlatSelector::Sinh);
    CHECK(c.case_path == "Thm3.2");
    CHECK(c.closed_form == ClosedFamily::FlatSinh);
    c = classify_flat(P(5, 2, Sign::Zero), FlatSelector::Cosh);
    CHECK(c.case_path == "Thm3.3");
    CHECK_THROWS_AS(classify_flat(P(4, 2, Sign::Zero), FlatSelector::Sinh), ContractError);
    CHECK_THROWS_AS(classify_flat(P(5, 2, Sign::Plus), FlatSelector::Linear), ContractError);
}

TEST_CASE("endpoint_asymptotics: exponents and coefficients") {
    auto p = P(3, 2, Sign::Plus);
    auto c = classify(p, 1.0, Pos);
    CHECK(c.case_path == "Thm1.I.3c");
    auto [a, b] = endpoint_asymptotics(c, 1.0, p);
    const AsymptoticTemplate& ck = a.kind == EndpointKind::CkExtension ? a : b;
    REQUIRE(ck.kind == EndpointKind::CkExtension);
    CHECK(ck.exponent == doctest::Approx(0.5));
    CHECK(ck.coefficient == doctest::Approx(-2.0));

    p = P(5, 2, Sign::Plus);
    c = classify(p, 1.0, Neg);
    CHECK(c.case_path == "Thm1.II.3a");
    bool found = false;
    for (const auto& e : c.endpoints)
        if (e.kind == EndpointKind::PowerDegeneracy) {
            CHECK(e.exponent == doctest::Approx(8.0));
            found = true;
        }
    CHECK(found);

    // Thm 2 Case II needs k odd; 2k = n with h = -1 gives the same exponent as the (4, 2) reading
    p = P(6, 3, Sign::Minus);
    c = classify(p, -1.0, Neg);
    CHECK(c.case_path == "Thm2.II.3b");
    found = false;
    for (const auto& e : c.endpoints)
        if (e.kind == EndpointKind::ConicalDegeneracy) {
            CHECK(e.exponent == doctest::Approx(2 * (std::sqrt(2.0) - 1)));
            found = true;
        }
    CHECK(found);
}

TEST_CASE("property: totality and uniqueness over the default grid") {
    const auto cells = make_grid(GridSpec{});
    std::set<std::string> leaves;
    int admissible = 0;
    for (const auto& cell : cells) {
        try {
            const SolutionClass c = classify(cell.params, cell.h, cell.branch, cell.xi_tt_sign);
            ++admissible;
            REQUIRE(!c.case_path.empty());
            leaves.insert(c.case_path);
            // deterministic
            REQUIRE(classify(cell.params, cell.h, cell.branch, cell.xi_tt_sign).case_path == c.case_path);
        } catch (const InadmissibleError&) {
        }
    }
    CHECK(admissible > 500);
    for (const auto& leaf : all_leaves()) CHECK_MESSAGE(leaves.count(leaf) == 1, leaf);
    for (const auto& leaf : leaves) CHECK_MESSAGE(std::count(all_leaves().begin(), all_leaves().end(), leaf) == 1, leaf);
}

TEST_CASE("property: inversion symmetry of monotone orbits") {
    struct C { int n, k; Sign s; double h; Branch b; };
    for (const C& x : {C{5, 2, Sign::Plus, -0.5, Pos}, C{5, 2, Sign::Plus, 1.0, Neg}, C{3, 2, Sign::Plus, -1.0, Neg},
                       C{6, 3, Sign::Minus, -1.0, Neg}, C{5, 2, Sign::Plus, 0.0, Neg}}) {
        const auto p = P(x.n, x.k, x.s);
        const LogState rep = representative_state(p, x.h, x.b);
        LogState mir = rep;
        mir.xi_t = -rep.xi_t;
        const SolutionClass a = classify_state(rep, p);
        const SolutionClass b = classify_state(mir, p);
        CHECK(a.case_path == b.case_path);
        if (a.monotone) {
            CHECK(a.inversion_applied != b.inversion_applied);
            const auto ea = oriented_endpoints(a), eb = oriented_endpoints(b);
            CHECK(ea[0].kind == eb[1].kind);
            CHECK(ea[1].kind == eb[0].kind);
        }
    }
}

TEST_CASE("classify_state agrees with classify on representatives") {
    const auto cells = make_grid(GridSpec{.n = {3, 4, 5, 6}, .k = {2, 3}});
    int checked = 0;
    for (const auto& cell : cells) {
        SolutionClass c;
        try {
            c = classify(cell.params, cell.h, cell.branch, cell.xi_tt_sign);
        } catch (const InadmissibleError&) {
            continue;
        }
        if (c.closed_form == ClosedFamily::Cylinder) continue;
        const LogState s = representative_state(cell.params, cell.h, cell.branch, cell.xi_tt_sign);
        CHECK_MESSAGE(classify_state(s, cell.params).case_path == c.case_path, c.case_path);
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("numeric agreement on representatives") {
    struct C { int n, k; Sign s; double h; Branch b; std::optional<Sign> x; };
    for (const C& x : {C{5, 2, Sign::Plus, 0.0, Pos, {}}, C{5, 2, Sign::Plus, -0.5, Pos, {}}, C{5, 2, Sign::Plus, 0.3, Pos, {}},
                       C{4, 2, Sign::Plus, 0.5, Pos, {}}, C{3, 2, Sign::Plus, 1.0, Pos, {}}, C{5, 2, Sign::Plus, 0.0, Neg, {}},
                       C{5, 2, Sign::Plus, 1.0, Neg, {}}, C{5, 3, Sign::Minus, -1.0, Neg, {}}, C{4, 2, Sign::Minus, 1.0, Pos, {}}}) {
        const auto p = P(x.n, x.k, x.s);
        const SolutionClass c = classify(p, x.h, x.b, x.x);
        const EndAgreement r = integrate_and_agree(c, representative_state(p, x.h, x.b, x.x), p);
        CHECK_MESSAGE(r.agreement.ok, c.case_path << ": " << r.agreement.why);
    }
}
