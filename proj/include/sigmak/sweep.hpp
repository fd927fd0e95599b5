#pragma once

// Parameter sweeps over (n, k, s, branch, h[, sign of xi_tt]) with parallel
// classification and spot integration, plus the endpoint-agreement test that
// compares a predicted class with an integrated trajectory.

#include <optional>
#include <string>
#include <vector>

#include "sigmak/classifier.hpp"
#include "sigmak/ode.hpp"

namespace sigmak {

// Every leaf of the sigma_k = +-const trees.
const std::vector<std::string>& all_leaves();

struct Agreement {
    bool ok = true;
    std::string why; // first mismatch
};

// Checks the terminal events of a trajectory started on the canonical member of
// `cls` against its predicted endpoint behaviour.
Agreement agree(const SolutionClass& cls, const Trajectory& traj, const MetricParams& p);

// Integration settings under which one predicted end can be checked. Smooth
// closures lie on h = 0, where an h error grows like e^{n xi}; cylinder
// approaches follow a saddle separatrix; conical ends grow xi linearly in t.
// Each gets a window short enough to stay conditioned. The rest run 40 in t,
// enough for the slowest algebraic approach.
IntegrationConfig agreement_config(const EndpointBehavior& end, const MetricParams& p);

struct EndAgreement {
    Agreement agreement;
    EventRecord inner_end, outer_end;
    double drift = 0.0; // scaled drift, worst of the runs
};

// Integrates from `start` under each end's agreement_config (once when they
// coincide) and checks each end against its own run.
EndAgreement integrate_and_agree(const SolutionClass& cls, const LogState& start, const MetricParams& p);

struct SweepCell {
    MetricParams params;
    double h = 0.0;
    Branch branch = Branch::Positive;
    std::optional<Sign> xi_tt_sign;
    std::string h_label; // how h was chosen ("0.5", "h*", "1.5h*", ...)
};

struct GridSpec {
    std::vector<int> n{3, 4, 5, 6, 7, 8};
    std::vector<int> k{2, 3, 4};
    std::vector<Sign> s{Sign::Plus, Sign::Minus};
    std::vector<Branch> branch{Branch::Positive, Branch::Negative};
    std::vector<double> h{-2.0, -1.0, -0.5, -1e-3, 0.0, 1e-3, 0.3, 0.5, 1.0, 2.0};
    // Adds 0.5h*, h*, 1.5h* where h* exists and 0.5, 1, 1.5 when 2k = n.
    bool add_thresholds = true;
};

std::vector<SweepCell> make_grid(const GridSpec& spec);

struct SweepResult {
    SweepCell cell;
    bool admissible = false;
    std::string error;
    std::optional<SolutionClass> cls;
    bool integrated = false;
    EventRecord inner_end, outer_end;
    double drift = 0.0;
    Agreement agreement;
};

SweepResult run_cell(const SweepCell& cell, bool spot_integrate);

// Results are returned in cell order regardless of scheduling.
std::vector<SweepResult> run_sweep(const std::vector<SweepCell>& cells, unsigned threads, bool spot_integrate);

// SIGMAK_THREADS if set and positive, else hardware concurrency.
unsigned default_threads();

} // namespace sigmak
