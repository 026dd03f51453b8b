#pragma once

#include <optional>
#include <string>
#include <vector>

#include "poscade/controller.hpp"

namespace poscade {

/// Free analysis constants of the gain-condition check plus the user-supplied
/// disturbance estimates. omega2 is taken as a direct positive input; its
/// definitional value k*alpha/(1 - phi2) turns negative whenever phi2 > 1 and
/// is reported alongside instead of being enforced.
struct AnalysisParams {
    double eps1 = 1.0;
    double eps2 = 1.0;
    double omega1 = 0.1;
    double omega2 = 0.1;
    double omega3 = 10.0;
    double phi2 = 4.0;
    double tau_hat = 0.2;
    double tau_tilde_bar = 3.0;
    double c1 = 5.0;  // bound on the reference-side residual
    double m = 5.0;   // bound on the second derivative of the control
    double psi = 1e7; // divergence tripwire on the stacked error norm

    void validate() const;
};

struct ConditionFlags {
    bool eps2 = false;        // eps2 < 2
    bool lambda = false;      // lambda > alpha/(2 eps1) + 1/(2 eps2)
    bool omega3 = false;      // omega3 > 4 tau_hat (alpha eps1 / 2 + k^2/(4 omega1))
    bool tau_tilde = false;   // tau_tilde_bar below its admissible ceiling

    bool all() const { return eps2 && lambda && omega3 && tau_tilde; }
};

/// Names used in reports, index 0..3 in condition order.
const char* condition_name(int index);

ConditionFlags check_conditions(const ControllerGains& g, const AnalysisParams& a);

/// sigma = min{1, 1 - eps2/2, lambda - (alpha/(2 eps1) + 1/(2 eps2)),
///             omega3/(4 tau_hat) - (alpha eps1/2 + k^2/(4 omega1)), k alpha/8}.
double compute_sigma(const ControllerGains& g, const AnalysisParams& a);

/// delta = 1/2 min{sigma/2, omega3 k^2/(4 omega1), omega3 k^2/(4 omega2),
///                 1/(4 (tau_tilde_bar + tau_hat))}.
double compute_delta(const AnalysisParams& a, double sigma, const ControllerGains& g);

/// Ultimate-bound radius sqrt((2 c1^2 + k alpha^2 tau_tilde_bar^2 m^2) / (k alpha delta));
/// empty when delta <= 0.
std::optional<double> compute_uub(const ControllerGains& g, const AnalysisParams& a,
                                  double delta);

struct Certificate {
    ControllerGains gains;
    AnalysisParams params;
    ConditionFlags flags;
    double sigma = 0.0;
    double delta = 0.0;
    std::optional<double> uub;
    bool feasible = false;
    double omega2_definitional = 0.0;  // k alpha / (1 - phi2), sign reported as-is
};

Certificate make_certificate(const ControllerGains& g, const AnalysisParams& a);

/// Quantities held fixed during the feasibility search.
struct SearchFixed {
    double tau_hat = 0.2;
    double phi2 = 4.0;
    double omega2 = 0.1;
    double c1 = 5.0;
    double m = 5.0;
    double psi = 1e7;
};

/// Deterministic log grid over the free parameters
/// (eps1, eps2, omega1, omega3, tau_tilde_bar).
struct SearchGrid {
    double exp_lo = -3.0;
    double exp_hi = 3.0;
    int points_per_axis = 13;
};

struct SearchOutcome {
    bool feasible = false;
    Certificate best;           // feasible point maximizing delta, valid when feasible
    int blocking_condition = -1;  // condition index when infeasible
    std::string blocking_name;
    double blocking_margin = 0.0; // smallest violation of the blocking condition
};

/// Grid-plus-refinement sweep maximizing delta subject to all condition
/// flags. When no cell is feasible, reports the first condition (in
/// condition order) that cannot be satisfied given the ones before it,
/// together with its tightest violation over the grid.
SearchOutcome feasibility_search(const ControllerGains& g, const SearchFixed& fixed,
                                 const SearchGrid& grid = {});
/// Serial reference path, kept for testing; identical results.
SearchOutcome feasibility_search_serial(const ControllerGains& g, const SearchFixed& fixed,
                                        const SearchGrid& grid = {});

}  // namespace poscade
