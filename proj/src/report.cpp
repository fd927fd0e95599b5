#include "sigmak/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "sigmak/errors.hpp"
#include "sigmak/first_integral.hpp"

namespace sigmak {

using nlohmann::json;

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Sign parse_sign(const std::string& s) {
    if (s == "+" || s == "+1" || s == "1") return Sign::Plus;
    if (s == "-" || s == "-1") return Sign::Minus;
    if (s == "0") return Sign::Zero;
    throw ContractError("sign must be one of +, -, 0 (got '" + s + "')");
}

Branch parse_branch(const std::string& s) {
    const Sign v = parse_sign(s);
    if (v == Sign::Zero) throw ContractError("branch must be + or -");
    return v == Sign::Plus ? Branch::Positive : Branch::Negative;
}

FlatSelector parse_family(const std::string& s) {
    for (FlatSelector f : {FlatSelector::Linear, FlatSelector::Sinh, FlatSelector::Cosh})
        if (s == to_string(f)) return f;
    throw ContractError("family must be linear, sinh or cosh (got '" + s + "')");
}

namespace {

const char* branch_name(Branch b) { return b == Branch::Positive ? "+" : "-"; }

template <class E, std::size_t N>
E enum_from(const json& j, const E (&all)[N], const char* what) {
    if (!j.is_string()) throw SchemaError(std::string(what) + ": expected a string");
    const std::string s = j.get<std::string>();
    for (E e : all)
        if (s == to_string(e)) return e;
    throw SchemaError(std::string(what) + ": unknown value '" + s + "'");
}

const DomainType kDomains[] = {DomainType::FullSpace, DomainType::PuncturedSpace, DomainType::Ball,
                               DomainType::PuncturedBall, DomainType::Annulus};
const EndpointKind kKinds[] = {
    EndpointKind::RoundSphereClosure, EndpointKind::SecondDerivBlowup, EndpointKind::PeriodicComplete,
    EndpointKind::ConeIncomplete,     EndpointKind::CkExtension,       EndpointKind::HyperbolicComplete,
    EndpointKind::LogComplete,        EndpointKind::PowerDegeneracy,   EndpointKind::ConicalDegeneracy,
    EndpointKind::CylinderAsymptote,  EndpointKind::CylinderExact,     EndpointKind::LogCuspComplete,
    EndpointKind::SmoothCenter,       EndpointKind::Unclassified};
const ConeClass kCones[] = {ConeClass::GammaPlusK, ConeClass::GammaMinusK, ConeClass::Indeterminate};
const ClosedFamily kFamilies[] = {ClosedFamily::RoundSphere, ClosedFamily::Cylinder, ClosedFamily::Hyperbolic,
                                  ClosedFamily::FlatLinear,  ClosedFamily::FlatSinh, ClosedFamily::FlatCosh};
const Sign kSigns[] = {Sign::Plus, Sign::Minus, Sign::Zero};
const FlatSelector kSelectors[] = {FlatSelector::Linear, FlatSelector::Sinh, FlatSelector::Cosh};

// NaN marks "not applicable" and is written as null.
json real_or_null(double x) { return std::isnan(x) ? json(nullptr) : json(x); }

template <class T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

// Closed field set: every key present, nothing else.
void require_keys(const json& j, std::initializer_list<const char*> keys, const char* where) {
    if (!j.is_object()) throw SchemaError(std::string(where) + ": expected an object");
    std::set<std::string> want(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!want.count(it.key())) throw SchemaError(std::string(where) + ": unknown field '" + it.key() + "'");
    for (const char* k : keys)
        if (!j.contains(k)) throw SchemaError(std::string(where) + ": missing field '" + k + "'");
}

double real_from(const json& j, const char* what) {
    if (j.is_null()) return EndpointBehavior::kNone;
    if (!j.is_number()) throw SchemaError(std::string(what) + ": expected a number or null");
    return j.get<double>();
}

std::optional<double> opt_real(const json& j, const char* what) {
    if (j.is_null()) return std::nullopt;
    if (!j.is_number()) throw SchemaError(std::string(what) + ": expected a number or null");
    return j.get<double>();
}

int int_from(const json& j, const char* what) {
    if (!j.is_number_integer()) throw SchemaError(std::string(what) + ": expected an integer");
    return j.get<int>();
}

bool bool_from(const json& j, const char* what) {
    if (!j.is_boolean()) throw SchemaError(std::string(what) + ": expected a boolean");
    return j.get<bool>();
}

std::string string_from(const json& j, const char* what) {
    if (!j.is_string()) throw SchemaError(std::string(what) + ": expected a string");
    return j.get<std::string>();
}

json endpoint_json(const ReportEndpoint& e) {
    const auto& b = e.behavior;
    return json{{"kind", to_string(b.kind)},
                {"vr_limit", b.vr_limit < 0 ? json(nullptr) : json(b.vr_limit)},
                {"exponent", real_or_null(b.exponent)},
                {"exponent2", real_or_null(b.exponent2)},
                {"holder", real_or_null(b.holder)},
                {"coefficient", real_or_null(b.coefficient)},
                {"location", e.location},
                {"law", e.law}};
}

ReportEndpoint endpoint_from(const json& j, const char* where) {
    require_keys(j, {"kind", "vr_limit", "exponent", "exponent2", "holder", "coefficient", "location", "law"}, where);
    ReportEndpoint e;
    e.behavior.kind = enum_from(j["kind"], kKinds, "kind");
    e.behavior.vr_limit = j["vr_limit"].is_null() ? -1 : int_from(j["vr_limit"], "vr_limit");
    e.behavior.exponent = real_from(j["exponent"], "exponent");
    e.behavior.exponent2 = real_from(j["exponent2"], "exponent2");
    e.behavior.holder = real_from(j["holder"], "holder");
    e.behavior.coefficient = real_from(j["coefficient"], "coefficient");
    e.location = string_from(j["location"], "location");
    e.law = string_from(j["law"], "law");
    return e;
}

ClassificationReport fill(const SolutionClass& c, const MetricParams& p, double h) {
    ClassificationReport r;
    r.inputs.n = p.n;
    r.inputs.k = p.k;
    r.inputs.s = p.s;
    try {
        r.h_star = critical_h(p);
    } catch (const NoThresholdError&) {
    }
    r.case_path = c.case_path;
    r.domain = c.domain;
    r.cone = c.cone;
    r.monotone = c.monotone;
    r.inversion_applied = c.inversion_applied;
    r.closed_form = c.closed_form;
    r.inner.behavior = c.endpoints[0];
    r.outer.behavior = c.endpoints[1];
    const auto [a, b] = endpoint_asymptotics(c, h, p);
    r.inner.location = a.location;
    r.inner.law = a.law;
    r.outer.location = b.location;
    r.outer.law = b.law;
    return r;
}

} // namespace

ClassificationReport make_report(const MetricParams& p, double h, Branch branch, std::optional<Sign> xi_tt_sign) {
    ClassificationReport r = fill(classify(p, h, branch, xi_tt_sign), p, h);
    r.inputs.h = h;
    r.inputs.branch = branch;
    r.inputs.xi_tt_sign = xi_tt_sign;
    return r;
}

ClassificationReport make_flat_report(const MetricParams& p, FlatSelector family) {
    ClassificationReport r = fill(classify_flat(p, family), p, 0.0);
    r.inputs.family = family;
    return r;
}

ClassificationReport make_state_report(const MetricParams& p, const LogState& state) {
    const FirstIntegralValue fv = conserved_h(state, p);
    const SolutionClass c = classify_state(state, p);
    ClassificationReport r = fill(c, p, fv.h);
    r.inputs.h = fv.h;
    r.inputs.branch = fv.branch;
    r.inputs.xi = state.xi;
    r.inputs.xi_t = state.xi_t;
    if (p.s == Sign::Minus && p.gap() < 0 && fv.branch == Branch::Positive) r.inputs.xi_tt_sign = xi_tt_sign(state, p);
    return r;
}

json to_json(const ClassificationReport& r) {
    const auto& in = r.inputs;
    json inputs{{"n", in.n},
                {"k", in.k},
                {"s", to_string(in.s)},
                {"h", opt(in.h)},
                {"branch", in.branch ? json(branch_name(*in.branch)) : json(nullptr)},
                {"xi_tt_sign", in.xi_tt_sign ? json(to_string(*in.xi_tt_sign)) : json(nullptr)},
                {"family", in.family ? json(to_string(*in.family)) : json(nullptr)},
                {"xi", opt(in.xi)},
                {"xi_t", opt(in.xi_t)}};
    return json{{"inputs", inputs},
                {"h_star", opt(r.h_star)},
                {"case_path", r.case_path},
                {"domain", to_string(r.domain)},
                {"endpoints", json{{"inner", endpoint_json(r.inner)}, {"outer", endpoint_json(r.outer)}}},
                {"cone", to_string(r.cone)},
                {"monotone", r.monotone},
                {"inversion_applied", r.inversion_applied},
                {"closed_form", r.closed_form ? json(to_string(*r.closed_form)) : json(nullptr)}};
}

ClassificationReport report_from_json(const json& j) {
    require_keys(j,
                 {"inputs", "h_star", "case_path", "domain", "endpoints", "cone", "monotone", "inversion_applied",
                  "closed_form"},
                 "report");
    ClassificationReport r;
    const json& in = j["inputs"];
    require_keys(in, {"n", "k", "s", "h", "branch", "xi_tt_sign", "family", "xi", "xi_t"}, "inputs");
    r.inputs.n = int_from(in["n"], "n");
    r.inputs.k = int_from(in["k"], "k");
    r.inputs.s = enum_from(in["s"], kSigns, "s");
    r.inputs.h = opt_real(in["h"], "h");
    if (!in["branch"].is_null()) r.inputs.branch = parse_branch(string_from(in["branch"], "branch"));
    if (!in["xi_tt_sign"].is_null()) r.inputs.xi_tt_sign = enum_from(in["xi_tt_sign"], kSigns, "xi_tt_sign");
    if (!in["family"].is_null()) r.inputs.family = enum_from(in["family"], kSelectors, "family");
    r.inputs.xi = opt_real(in["xi"], "xi");
    r.inputs.xi_t = opt_real(in["xi_t"], "xi_t");
    r.h_star = opt_real(j["h_star"], "h_star");
    r.case_path = string_from(j["case_path"], "case_path");
    r.domain = enum_from(j["domain"], kDomains, "domain");
    require_keys(j["endpoints"], {"inner", "outer"}, "endpoints");
    r.inner = endpoint_from(j["endpoints"]["inner"], "endpoints.inner");
    r.outer = endpoint_from(j["endpoints"]["outer"], "endpoints.outer");
    r.cone = enum_from(j["cone"], kCones, "cone");
    r.monotone = bool_from(j["monotone"], "monotone");
    r.inversion_applied = bool_from(j["inversion_applied"], "inversion_applied");
    if (!j["closed_form"].is_null()) r.closed_form = enum_from(j["closed_form"], kFamilies, "closed_form");
    return r;
}

std::string to_text(const ClassificationReport& r) {
    std::ostringstream os;
    const auto& in = r.inputs;
    os << "n=" << in.n << " k=" << in.k << " s=" << to_string(in.s);
    if (in.h) os << " h=" << format_real(*in.h);
    if (in.branch) os << " branch=" << branch_name(*in.branch);
    if (in.xi_tt_sign) os << " xi_tt_sign=" << to_string(*in.xi_tt_sign);
    if (in.family) os << " family=" << to_string(*in.family);
    os << "\n";
    if (r.h_star) os << "h*: " << format_real(*r.h_star) << "\n";
    os << "case: " << r.case_path << "\n";
    os << "domain: " << to_string(r.domain) << "\n";
    for (const auto* e : {&r.inner, &r.outer}) {
        os << (e == &r.inner ? "inner: " : "outer: ") << to_string(e->behavior.kind);
        if (!e->location.empty()) os << " at " << e->location;
        if (!e->law.empty()) os << ", " << e->law;
        os << "\n";
    }
    os << "cone: " << to_string(r.cone) << "\n";
    os << "monotone: " << (r.monotone ? "yes" : "no") << ", inversion applied: " << (r.inversion_applied ? "yes" : "no")
       << "\n";
    if (r.closed_form) os << "closed form: " << to_string(*r.closed_form) << "\n";
    return os.str();
}

TrajectoryTable make_table(const Trajectory& traj) {
    const MetricParams& p = traj.params;
    TrajectoryTable t;
    t.meta = {{"n", std::to_string(p.n)},
              {"k", std::to_string(p.k)},
              {"s", to_string(p.s)},
              {"h0", format_real(traj.h0.h)},
              {"branch", branch_name(traj.h0.branch)},
              {"drift", format_real(traj.drift)},
              {"scaled_drift", format_real(traj.scaled_drift)}};
    for (const auto& e : traj.events) {
        std::ostringstream os;
        os << to_string(e.kind) << " t=" << format_real(e.t) << " xi=" << format_real(e.xi)
           << " xi_t=" << format_real(e.xi_t) << " side=" << e.side;
        t.meta.emplace_back("event", os.str());
    }
    t.columns = {"t", "r", "xi", "xi_t", "xi_tt", "v", "v_r", "v_rr", "h_drift"};
    for (int l = 1; l <= p.k; ++l) t.columns.push_back("sigma_" + std::to_string(l));
    for (const auto& s : traj.samples) {
        const RadialJet j = from_log(s.state);
        std::vector<double> row{s.state.t,  j.r,   s.state.xi, s.state.xi_t, *s.state.xi_tt,
                                j.v,        j.v_r, j.v_rr,     first_integral(s.state.xi, s.w, p) - traj.h0.h};
        for (int l = 1; l <= p.k; ++l) row.push_back(sigma_l_from_w(s.state.xi, s.w, *s.state.xi_tt, l, p.n));
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_csv(std::ostream& os, const TrajectoryTable& table) {
    for (const auto& [key, value] : table.meta) os << "# " << key << ": " << value << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
    os << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_real(row[i]);
        os << "\n";
    }
}

TrajectoryTable read_csv(std::istream& is) {
    TrajectoryTable t;
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.starts_with("# ")) {
            const auto colon = line.find(": ");
            if (colon == std::string::npos) throw SchemaError("metadata line without ': '");
            t.meta.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (!header) {
            t.columns = cells;
            header = true;
            continue;
        }
        if (cells.size() != t.columns.size()) throw SchemaError("row width differs from the header");
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(std::stod(c));
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::vector<PortraitCurve> portrait(const MetricParams& p, std::span<const double> hs, double xi_lo, double xi_hi,
                                    int samples) {
    if (!(xi_lo < xi_hi)) throw ContractError("portrait: xi range must be increasing");
    if (samples < 2) throw ContractError("portrait: need at least two samples per segment");
    std::vector<PortraitCurve> out;
    for (double h : hs) {
        for (Branch b : {Branch::Positive, Branch::Negative}) {
            std::vector<XiInterval> ivs;
            try {
                ivs = admissible_intervals(h, b, p);
            } catch (const Error&) {
            }
            for (int sign : {1, -1}) {
                PortraitCurve c;
                c.h = h;
                c.branch = b;
                c.sign = sign;
                for (const auto& iv : ivs) {
                    const double lo = std::max(iv.lo, xi_lo);
                    const double hi = std::min(iv.hi, xi_hi);
                    if (lo > hi) continue;
                    std::vector<std::pair<double, double>> seg;
                    if (lo == hi) {
                        const double v = level_speed(lo, h, b, p);
                        if (std::isfinite(v)) seg.emplace_back(lo, sign * v + 0.0);
                    } else {
                        // cosine spacing resolves the square-root shape at turning points
                        for (int i = 0; i < samples; ++i) {
                            const double u = 0.5 * (1.0 - std::cos(std::numbers::pi * i / (samples - 1)));
                            const double x = i == samples - 1 ? hi : lo + (hi - lo) * u;
                            double v = level_speed(x, h, b, p);
                            if (!std::isfinite(v)) {
                                // endpoint roots may land a rounding error outside the level set
                                const bool at_end = i == 0 || i == samples - 1;
                                if (!at_end) continue;
                                v = b == Branch::Positive ? (std::abs(profile_D(x, h, p) - 1.0) < 1e-9 ? 0.0 : 1.0)
                                                          : 1.0;
                            }
                            seg.emplace_back(x, sign * v + 0.0); // no negative zero at turning points
                        }
                    }
                    if (!seg.empty()) c.segments.push_back(std::move(seg));
                }
                out.push_back(std::move(c));
            }
        }
    }
    return out;
}

std::string curve_file_stem(const PortraitCurve& c) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "h%.6g_b%s_%s", c.h, c.branch == Branch::Positive ? "pos" : "neg",
                  c.sign > 0 ? "up" : "down");
    return buf;
}

void write_curve_csv(std::ostream& os, const PortraitCurve& c) {
    os << "# h: " << format_real(c.h) << "\n";
    os << "# branch: " << branch_name(c.branch) << "\n";
    os << "# sign: " << (c.sign > 0 ? "+" : "-") << "\n";
    os << "segment,xi,xi_t\n";
    for (std::size_t s = 0; s < c.segments.size(); ++s)
        for (const auto& [x, y] : c.segments[s]) os << s << "," << format_real(x) << "," << format_real(y) << "\n";
}

void write_svg(std::ostream& os, const std::vector<PortraitCurve>& curves, double xi_lo, double xi_hi) {
    double ymax = 1.5;
    for (const auto& c : curves)
        for (const auto& seg : c.segments)
            for (const auto& pt : seg) ymax = std::max(ymax, std::min(std::abs(pt.second), 6.0));
    const double W = 640, H = 480, m = 40;
    auto X = [&](double x) { return m + (x - xi_lo) / (xi_hi - xi_lo) * (W - 2 * m); };
    auto Y = [&](double y) { return H / 2 - y / ymax * (H / 2 - m); };
    std::vector<double> hs;
    for (const auto& c : curves)
        if (std::find(hs.begin(), hs.end(), c.h) == hs.end()) hs.push_back(c.h);
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"};
    char buf[160];
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
       << W << " " << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#999\"/>\n", m, Y(0), W - m,
                  Y(0));
    os << buf;
    if (xi_lo < 0 && xi_hi > 0) {
        std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#999\"/>\n", X(0), m,
                      X(0), H - m);
        os << buf;
    }
    for (double y : {-1.0, 1.0}) {
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#ccc\" stroke-dasharray=\"4 4\"/>\n", m,
                      Y(y), W - m, Y(y));
        os << buf;
    }
    os << "<text x=\"" << W - m << "\" y=\"" << Y(0) - 6 << "\" text-anchor=\"end\" font-size=\"12\">xi</text>\n";
    os << "<text x=\"" << m + 4 << "\" y=\"" << m - 8 << "\" font-size=\"12\">xi_t</text>\n";
    for (const auto& c : curves) {
        const auto idx = std::find(hs.begin(), hs.end(), c.h) - hs.begin();
        const char* color = palette[idx % 7];
        for (const auto& seg : c.segments) {
            if (seg.size() == 1) {
                std::snprintf(buf, sizeof buf, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"3\" fill=\"%s\"/>\n",
                              X(seg[0].first), Y(seg[0].second), color);
                os << buf;
                continue;
            }
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (const auto& [x, y] : seg) {
                if (std::abs(y) > ymax) continue;
                std::snprintf(buf, sizeof buf, "%.3f,%.3f ", X(x), Y(y));
                os << buf;
            }
            os << "\"/>\n";
        }
    }
    for (std::size_t i = 0; i < hs.size(); ++i) {
        std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"12\" fill=\"%s\">h = %.6g</text>\n",
                      W - m - 90, m + 14.0 * (i + 1), palette[i % 7], hs[i]);
        os << buf;
    }
    os << "</svg>\n";
}

} // namespace sigmak
