#pragma once

// Decision procedure from (n, k, s, branch, h[, sign of xi_tt]) to the leaf of
// the classification trees for sigma_k = +-const and to the three sigma_k = 0
// families, with domain type, endpoint behaviour and cone membership.

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "sigmak/closed_forms.hpp"
#include "sigmak/schouten.hpp"

namespace sigmak {

enum class DomainType { FullSpace, PuncturedSpace, Ball, PuncturedBall, Annulus };

enum class EndpointKind {
    RoundSphereClosure,
    SecondDerivBlowup,
    PeriodicComplete,
    ConeIncomplete,
    CkExtension,
    HyperbolicComplete,
    LogComplete,
    PowerDegeneracy,
    ConicalDegeneracy,
    CylinderAsymptote,
    CylinderExact,
    LogCuspComplete,
    // Regular interior point r = 0 of a ball (the hyperbolic solutions).
    SmoothCenter,
    // Ends of the sigma_k = 0 families, which carry no endpoint statement.
    Unclassified,
};

const char* to_string(DomainType d);
const char* to_string(EndpointKind k);

struct EndpointBehavior {
    static constexpr double kNone = std::numeric_limits<double>::quiet_NaN();

    EndpointKind kind = EndpointKind::Unclassified;
    // SecondDerivBlowup: 0 when v_r -> 0, 2 when r v_r / v -> 2.
    int vr_limit = -1;
    // Blow-up rate, cone/power/conical exponent, or the |x| exponent of a log cusp.
    double exponent = kNone;
    // Log-power exponent of a log cusp.
    double exponent2 = kNone;
    double holder = kNone;
    double coefficient = kNone;

    bool operator==(const EndpointBehavior& o) const;
};

struct SolutionClass {
    std::string case_path;
    DomainType domain = DomainType::PuncturedSpace;
    std::array<EndpointBehavior, 2> endpoints; // (inner, outer) in canonical orientation
    ConeClass cone = ConeClass::Indeterminate;
    std::optional<ClosedFamily> closed_form;
    // Orbits without turning points come in mirror pairs under t -> -t; the
    // canonical member has xi_t < 0.
    bool monotone = false;
    bool inversion_applied = false;
};

// Endpoints in the orientation of the classified state (undoes the canonical
// normalization when an inversion was applied).
std::array<EndpointBehavior, 2> oriented_endpoints(const SolutionClass& c);

// Tolerances used to route h onto the codimension-one leaves.
inline constexpr double kThresholdRelTol = 1e-9;
inline constexpr double kZeroTol = 1e-12;

// xi_tt_sign is required exactly for s=-1, 2k>n, branch=+1, h >= h*.
SolutionClass classify(const MetricParams& p, double h, Branch branch, std::optional<Sign> xi_tt_sign = {});

SolutionClass classify_flat(const MetricParams& p, FlatSelector family);

// Sign of xi_tt at a state, from the explicit second-order form.
Sign xi_tt_sign(const LogState& state, const MetricParams& p);

// Classifies the solution through a state; records inversion for mirror orbits.
SolutionClass classify_state(const LogState& state, const MetricParams& p);

struct AsymptoticTemplate {
    EndpointKind kind = EndpointKind::Unclassified;
    std::string location; // r->0, r->inf, r->r_minus, r->r_plus, r->r_star
    std::string law;      // human-readable leading-order law
    double exponent = EndpointBehavior::kNone;
    double exponent2 = EndpointBehavior::kNone;
    double coefficient = EndpointBehavior::kNone;
};

std::pair<AsymptoticTemplate, AsymptoticTemplate> endpoint_asymptotics(const SolutionClass& c, double h,
                                                                       const MetricParams& p);

// A state on the canonical member of the classified orbit: a turning point when
// the orbit has one, otherwise an interior point with xi_t < 0.
LogState representative_state(const MetricParams& p, double h, Branch branch, std::optional<Sign> xi_tt_sign = {});

} // namespace sigmak
