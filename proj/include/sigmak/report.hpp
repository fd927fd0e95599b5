#pragma once

// Serialized artifacts: classification reports (JSON with a closed field set),
// trajectory tables (CSV with '#' metadata) and phase portraits (polyline CSV
// and a standalone SVG). Curves are algebraic: xi_t = +-level_speed(xi).

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sigmak/classifier.hpp"
#include "sigmak/ode.hpp"

namespace sigmak {

// Unknown, missing or mistyped fields while reading a report.
struct SchemaError : ContractError {
    using ContractError::ContractError;
};

struct ReportInputs {
    int n = 3;
    int k = 2;
    Sign s = Sign::Plus;
    std::optional<double> h;
    std::optional<Branch> branch;
    std::optional<Sign> xi_tt_sign;
    std::optional<FlatSelector> family;
    // set when the class was derived from a state
    std::optional<double> xi;
    std::optional<double> xi_t;

    bool operator==(const ReportInputs&) const = default;
};

struct ReportEndpoint {
    EndpointBehavior behavior;
    std::string location;
    std::string law;

    bool operator==(const ReportEndpoint&) const = default;
};

struct ClassificationReport {
    ReportInputs inputs;
    std::optional<double> h_star;
    std::string case_path;
    DomainType domain = DomainType::PuncturedSpace;
    ReportEndpoint inner, outer; // canonical orientation
    ConeClass cone = ConeClass::Indeterminate;
    bool monotone = false;
    bool inversion_applied = false;
    std::optional<ClosedFamily> closed_form;

    bool operator==(const ClassificationReport&) const = default;
};

ClassificationReport make_report(const MetricParams& p, double h, Branch branch,
                                 std::optional<Sign> xi_tt_sign = {});
ClassificationReport make_flat_report(const MetricParams& p, FlatSelector family);
ClassificationReport make_state_report(const MetricParams& p, const LogState& state);

nlohmann::json to_json(const ClassificationReport& r);
// Throws SchemaError on any unknown, missing or mistyped field.
ClassificationReport report_from_json(const nlohmann::json& j);
std::string to_text(const ClassificationReport& r);

// Parsers for the CLI spellings: "+", "-", "0" and "+1", "-1".
Sign parse_sign(const std::string& s);
Branch parse_branch(const std::string& s);
FlatSelector parse_family(const std::string& s);

struct TrajectoryTable {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns; // t r xi xi_t xi_tt v v_r v_rr h_drift sigma_1..sigma_k
    std::vector<std::vector<double>> rows;
};

TrajectoryTable make_table(const Trajectory& traj);
// Numbers are written with 17 significant digits.
void write_csv(std::ostream& os, const TrajectoryTable& table);
TrajectoryTable read_csv(std::istream& is);

struct PortraitCurve {
    double h = 0.0;
    Branch branch = Branch::Positive;
    int sign = 1;                                   // sign of xi_t on the curve
    std::vector<std::vector<std::pair<double, double>>> segments; // (xi, xi_t) polylines
    bool empty() const { return segments.empty(); }
};

// One curve per (h, branch, sign); segments follow the admissible xi-intervals
// clipped to [xi_lo, xi_hi], sampled densely near their ends.
std::vector<PortraitCurve> portrait(const MetricParams& p, std::span<const double> hs, double xi_lo, double xi_hi,
                                    int samples);

std::string curve_file_stem(const PortraitCurve& c);
void write_curve_csv(std::ostream& os, const PortraitCurve& c);
void write_svg(std::ostream& os, const std::vector<PortraitCurve>& curves, double xi_lo, double xi_hi);

// printf("%.17g")
std::string format_real(double x);

} // namespace sigmak
