#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sigmak/errors.hpp"
#include "sigmak/first_integral.hpp"
#include "sigmak/report.hpp"

using namespace sigmak;
using nlohmann::json;

namespace {
MetricParams P(int n, int k, Sign s) { return MetricParams::make(n, k, s); }

std::vector<ClassificationReport> samples() {
    const auto m = P(3, 2, Sign::Minus);
    return {make_report(P(5, 2, Sign::Plus), 0.0, Branch::Positive),
            make_report(P(4, 2, Sign::Plus), 0.5, Branch::Positive),
            make_report(P(5, 3, Sign::Plus), -1.0, Branch::Negative),
            make_report(m, critical_h(m), Branch::Positive, Sign::Zero),
            make_report(P(6, 3, Sign::Minus), -1.0, Branch::Negative),
            make_flat_report(P(5, 2, Sign::Zero), FlatSelector::Sinh),
            make_state_report(P(5, 2, Sign::Plus), {0, 0.3, 0.7, {}})};
}
} // namespace

TEST_CASE("report: JSON round trip is lossless") {
    for (const auto& r : samples()) {
        const json j = to_json(r);
        const ClassificationReport back = report_from_json(json::parse(j.dump()));
        CHECK(back == r);
        CHECK(to_json(back).dump() == j.dump());
    }
    const auto r = samples()[4];
    CHECK(r.case_path == "Thm2.II.3b");
    CHECK(to_json(r)["h_star"].is_null());
}

TEST_CASE("report: closed schema fails loudly") {
    const json j = to_json(samples()[0]);
    json extra = j;
    extra["colour"] = "blue";
    CHECK_THROWS_AS(report_from_json(extra), SchemaError);
    json nested = j;
    nested["endpoints"]["inner"]["note"] = 1;
    CHECK_THROWS_AS(report_from_json(nested), SchemaError);
    for (const auto& key : {"case_path", "inputs", "cone", "endpoints"}) {
        json missing = j;
        missing.erase(key);
        CHECK_THROWS_AS(report_from_json(missing), SchemaError);
    }
    json bad = j;
    bad["domain"] = "Torus";
    CHECK_THROWS_AS(report_from_json(bad), SchemaError);
    bad = j;
    bad["inputs"]["n"] = 5.5;
    CHECK_THROWS_AS(report_from_json(bad), SchemaError);
}

TEST_CASE("report: text rendering names the leaf") {
    const std::string s = to_text(samples()[0]);
    CHECK(s.find("case: Thm1.I.1") != std::string::npos);
    CHECK(s.find("RoundSphereClosure") != std::string::npos);
}

TEST_CASE("parsers") {
    CHECK(parse_sign("+") == Sign::Plus);
    CHECK(parse_sign("-1") == Sign::Minus);
    CHECK(parse_sign("0") == Sign::Zero);
    CHECK_THROWS_AS(parse_sign("x"), ContractError);
    CHECK(parse_branch("-") == Branch::Negative);
    CHECK_THROWS_AS(parse_branch("0"), ContractError);
    CHECK(parse_family("cosh") == FlatSelector::Cosh);
    CHECK_THROWS_AS(parse_family("tanh"), ContractError);
}

TEST_CASE("trajectory table: columns, order and CSV round trip") {
    for (int k : {2, 3}) {
        const auto p = P(7, k, Sign::Plus);
        IntegrationConfig cfg;
        cfg.max_span = 3;
        const Trajectory tr = integrate({0, 0.2, 0.1, {}}, p, cfg);
        const TrajectoryTable t = make_table(tr);
        CHECK(t.columns.size() == std::size_t(9 + k));
        CHECK(t.columns.front() == "t");
        CHECK(t.columns.back() == "sigma_" + std::to_string(k));
        for (std::size_t i = 1; i < t.rows.size(); ++i) REQUIRE(t.rows[i][0] > t.rows[i - 1][0]);
        std::stringstream ss;
        write_csv(ss, t);
        const TrajectoryTable back = read_csv(ss);
        CHECK(back.columns == t.columns);
        CHECK(back.meta == t.meta);
        REQUIRE(back.rows.size() == t.rows.size());
        for (std::size_t i = 0; i < t.rows.size(); ++i)
            for (std::size_t c = 0; c < t.columns.size(); ++c) REQUIRE(back.rows[i][c] == t.rows[i][c]);
        // sigma_k column carries the normalized constant
        for (const auto& row : t.rows) REQUIRE(row.back() == doctest::Approx(normalized_sigma(p)).epsilon(1e-8));
    }
    std::stringstream bad("t,r\n1,2,3\n");
    CHECK_THROWS_AS(read_csv(bad), SchemaError);
}

TEST_CASE("determinism: identical inputs give identical bytes") {
    const auto p = P(5, 2, Sign::Plus);
    auto render = [&] {
        IntegrationConfig cfg;
        cfg.max_span = 4;
        std::stringstream ss;
        write_csv(ss, make_table(integrate({0, 0.1, -0.3, {}}, p, cfg)));
        return ss.str();
    };
    CHECK(render() == render());
}

TEST_CASE("portrait") {
    const auto p = P(5, 2, Sign::Plus);
    const double hs = critical_h(p);
    const double list[] = {0.1, 0.3, 0.5, 0.0, hs};
    const auto curves = portrait(p, list, -3, 4, 101);
    auto find = [&](double h, Branch b, int sign) -> const PortraitCurve& {
        for (const auto& c : curves)
            if (c.h == h && c.branch == b && c.sign == sign) return c;
        throw std::runtime_error("missing curve");
    };
    // nested closed curves: the xi-extent shrinks as h grows to h*
    double prev_w = 1e9;
    for (double h : {0.1, 0.3, 0.5}) {
        const auto& up = find(h, Branch::Positive, 1);
        REQUIRE(up.segments.size() == 1);
        const auto& seg = up.segments[0];
        // speed is sqrt(1 - D^{1/k}): rounding in D shows as ~1e-8 at the turning points
        CHECK(std::abs(seg.front().second) <= 1e-7);
        CHECK(std::abs(seg.back().second) <= 1e-7);
        const double w = seg.back().first - seg.front().first;
        CHECK(w < prev_w);
        prev_w = w;
        CHECK(seg.front().first < critical_xi(p));
        CHECK(seg.back().first > critical_xi(p));
        for (const auto& [x, y] : seg) CHECK(y >= 0.0);
    }
    // h = 0 passes through (0, 0)
    bool origin = false;
    for (const auto& seg : find(0.0, Branch::Positive, 1).segments)
        for (const auto& [x, y] : seg) origin |= std::abs(x) < 1e-9 && std::abs(y) < 1e-9;
    CHECK(origin);
    // h = h* degenerates to the equilibrium point
    const auto& eq = find(hs, Branch::Positive, 1);
    REQUIRE(eq.segments.size() == 1);
    REQUIRE(eq.segments[0].size() == 1);
    CHECK(eq.segments[0][0].first == doctest::Approx(critical_xi(p)).epsilon(1e-6));
    CHECK(eq.segments[0][0].second == 0.0);
    CHECK(curve_file_stem(find(0.3, Branch::Negative, -1)) == "h0.3_bneg_down");
    // s = +1, k odd: the negative branch needs (1 - xi_t^2)^k = D < 0, impossible for h > 0
    const double pos[] = {1.0};
    for (const auto& c : portrait(P(5, 3, Sign::Plus), pos, -2, 2, 11))
        if (c.branch == Branch::Negative) CHECK(c.empty());
    CHECK_THROWS_AS(portrait(p, list, 1, -1, 11), ContractError);
}
