#include "poscade/certify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace poscade {

void AnalysisParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be > 0");
    };
    positive(eps1, "analysis.eps1");
    positive(eps2, "analysis.eps2");
    positive(omega1, "analysis.omega1");
    positive(omega2, "analysis.omega2");
    positive(omega3, "analysis.omega3");
    positive(phi2, "analysis.phi2");
    positive(tau_hat, "analysis.tau_hat");
    positive(psi, "analysis.psi");
    if (!(tau_tilde_bar >= 0.0))
        throw std::invalid_argument("analysis.tau_tilde_bar must be >= 0");
    if (!(c1 >= 0.0)) throw std::invalid_argument("analysis.c1 must be >= 0");
    if (!(m >= 0.0)) throw std::invalid_argument("analysis.m must be >= 0");
}

const char* condition_name(int index) {
    switch (index) {
        case 0: return "eps2";
        case 1: return "lambda";
        case 2: return "omega3";
        case 3: return "tau_tilde_bar";
    }
    return "unknown";
}

namespace {

// signed violations: the condition holds iff the value is < 0
struct ConditionMargins {
    double v_eps2 = 0.0;
    double v_lambda = 0.0;
    double v_omega3 = 0.0;
    double v_tau_tilde = 0.0;
};

ConditionMargins margins(const ControllerGains& g, double eps1, double eps2, double omega1,
                         double omega2, double omega3, double tau_hat, double tau_tilde_bar) {
    ConditionMargins m;
    m.v_eps2 = eps2 - 2.0;
    m.v_lambda = (g.alpha / (2.0 * eps1) + 1.0 / (2.0 * eps2)) - g.lambda;
    m.v_omega3 = 4.0 * tau_hat * (g.alpha * eps1 / 2.0 + g.k * g.k / (4.0 * omega1)) - omega3;
    const double ceiling =
        (g.k * g.alpha / 8.0 - omega1 - omega2 - g.alpha / 2.0 - omega3 * g.k * tau_hat) /
        (omega3 * g.k);
    m.v_tau_tilde = tau_tilde_bar - ceiling;
    return m;
}

}  // namespace

ConditionFlags check_conditions(const ControllerGains& g, const AnalysisParams& a) {
    g.validate();
    a.validate();
    const ConditionMargins m = margins(g, a.eps1, a.eps2, a.omega1, a.omega2, a.omega3,
                                       a.tau_hat, a.tau_tilde_bar);
    ConditionFlags f;
    f.eps2 = m.v_eps2 < 0.0;
    f.lambda = m.v_lambda < 0.0;
    f.omega3 = m.v_omega3 < 0.0;
    f.tau_tilde = m.v_tau_tilde < 0.0;
    return f;
}

double compute_sigma(const ControllerGains& g, const AnalysisParams& a) {
    const double t1 = 1.0;
    const double t2 = 1.0 - a.eps2 / 2.0;
    const double t3 = g.lambda - (g.alpha / (2.0 * a.eps1) + 1.0 / (2.0 * a.eps2));
    const double t4 = a.omega3 / (4.0 * a.tau_hat) -
                      (g.alpha * a.eps1 / 2.0 + g.k * g.k / (4.0 * a.omega1));
    const double t5 = g.k * g.alpha / 8.0;
    return std::min({t1, t2, t3, t4, t5});
}

double compute_delta(const AnalysisParams& a, double sigma, const ControllerGains& g) {
    const double t1 = sigma / 2.0;
    const double t2 = a.omega3 * g.k * g.k / (4.0 * a.omega1);
    const double t3 = a.omega3 * g.k * g.k / (4.0 * a.omega2);
    const double t4 = 1.0 / (4.0 * (a.tau_tilde_bar + a.tau_hat));
    return 0.5 * std::min({t1, t2, t3, t4});
}

std::optional<double> compute_uub(const ControllerGains& g, const AnalysisParams& a,
                                  double delta) {
    if (!(delta > 0.0)) return std::nullopt;
    const double num = 2.0 * a.c1 * a.c1 +
                       g.k * g.alpha * g.alpha * a.tau_tilde_bar * a.tau_tilde_bar * a.m * a.m;
    return std::sqrt(num / (g.k * g.alpha * delta));
}

Certificate make_certificate(const ControllerGains& g, const AnalysisParams& a) {
    Certificate c;
    c.gains = g;
    c.params = a;
    c.flags = check_conditions(g, a);
    c.sigma = compute_sigma(g, a);
    c.delta = compute_delta(a, c.sigma, g);
    c.uub = compute_uub(g, a, c.delta);
    c.feasible = c.flags.all();
    c.omega2_definitional = g.k * g.alpha / (1.0 - a.phi2);
    return c;
}

namespace {

struct Axes {
    std::vector<double> values;  // one shared log axis
    int pts = 0;

    double value(int i) const { return values[i]; }
};

Axes make_axes(const SearchGrid& grid) {
    if (grid.points_per_axis < 2) throw std::invalid_argument("grid needs >= 2 points per axis");
    Axes ax;
    ax.pts = grid.points_per_axis;
    ax.values.resize(grid.points_per_axis);
    for (int i = 0; i < grid.points_per_axis; ++i) {
        const double e = grid.exp_lo +
                         (grid.exp_hi - grid.exp_lo) * i / (grid.points_per_axis - 1);
        ax.values[i] = std::pow(10.0, e);
    }
    return ax;
}

AnalysisParams cell_params(const SearchFixed& fixed, double eps1, double eps2, double omega1,
                           double omega3, double tau_tilde_bar) {
    AnalysisParams a;
    a.eps1 = eps1;
    a.eps2 = eps2;
    a.omega1 = omega1;
    a.omega2 = fixed.omega2;
    a.omega3 = omega3;
    a.phi2 = fixed.phi2;
    a.tau_hat = fixed.tau_hat;
    a.tau_tilde_bar = tau_tilde_bar;
    a.c1 = fixed.c1;
    a.m = fixed.m;
    a.psi = fixed.psi;
    return a;
}

// delta when all conditions hold, -inf otherwise
double cell_objective(const ControllerGains& g, const SearchFixed& fixed, double eps1,
                      double eps2, double omega1, double omega3, double tau_tilde_bar) {
    const ConditionMargins m =
        margins(g, eps1, eps2, omega1, fixed.omega2, omega3, fixed.tau_hat, tau_tilde_bar);
    if (!(m.v_eps2 < 0.0 && m.v_lambda < 0.0 && m.v_omega3 < 0.0 && m.v_tau_tilde < 0.0))
        return -std::numeric_limits<double>::infinity();
    AnalysisParams a = cell_params(fixed, eps1, eps2, omega1, omega3, tau_tilde_bar);
    return compute_delta(a, compute_sigma(g, a), g);
}

SearchOutcome run_search(const ControllerGains& g, const SearchFixed& fixed,
                         const SearchGrid& grid, bool parallel) {
    g.validate();
    if (!(fixed.tau_hat > 0.0))
        throw std::invalid_argument("feasibility_search requires tau_hat > 0");
    if (!(fixed.omega2 > 0.0))
        throw std::invalid_argument("feasibility_search requires omega2 > 0");

    const Axes ax = make_axes(grid);
    const int p = ax.pts;
    const long total = static_cast<long>(p) * p * p * p * p;

    std::vector<double> obj(total);
#pragma omp parallel for schedule(static) if (parallel)
    for (long idx = 0; idx < total; ++idx) {
        long r = idx;
        const int i4 = static_cast<int>(r % p); r /= p;  // tau_tilde_bar
        const int i3 = static_cast<int>(r % p); r /= p;  // omega3
        const int i2 = static_cast<int>(r % p); r /= p;  // omega1
        const int i1 = static_cast<int>(r % p); r /= p;  // eps2
        const int i0 = static_cast<int>(r);              // eps1
        obj[idx] = cell_objective(g, fixed, ax.value(i0), ax.value(i1), ax.value(i2),
                                  ax.value(i3), ax.value(i4));
    }

    // deterministic argmax, first index wins ties
    long best_idx = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (long idx = 0; idx < total; ++idx) {
        if (obj[idx] > best) {
            best = obj[idx];
            best_idx = idx;
        }
    }

    SearchOutcome out;
    if (best_idx >= 0 && std::isfinite(best)) {
        long r = best_idx;
        const int i4 = static_cast<int>(r % p); r /= p;
        const int i3 = static_cast<int>(r % p); r /= p;
        const int i2 = static_cast<int>(r % p); r /= p;
        const int i1 = static_cast<int>(r % p); r /= p;
        const int i0 = static_cast<int>(r);
        const double h = (grid.exp_hi - grid.exp_lo) / (grid.points_per_axis - 1);
        auto exp_of = [&](int i) { return grid.exp_lo + h * i; };

        // one bisection refinement pass around the winning cell
        std::array<std::array<double, 3>, 5> cand;
        const std::array<double, 5> base_exp = {exp_of(i0), exp_of(i1), exp_of(i2), exp_of(i3),
                                                exp_of(i4)};
        for (int a = 0; a < 5; ++a) {
            cand[a] = {std::max(grid.exp_lo, base_exp[a] - h / 2.0), base_exp[a],
                       std::min(grid.exp_hi, base_exp[a] + h / 2.0)};
        }
        double best_ref = best;
        std::array<double, 5> best_vals = {std::pow(10.0, base_exp[0]), std::pow(10.0, base_exp[1]),
                                           std::pow(10.0, base_exp[2]), std::pow(10.0, base_exp[3]),
                                           std::pow(10.0, base_exp[4])};
        for (int a0 = 0; a0 < 3; ++a0)
            for (int a1 = 0; a1 < 3; ++a1)
                for (int a2 = 0; a2 < 3; ++a2)
                    for (int a3 = 0; a3 < 3; ++a3)
                        for (int a4 = 0; a4 < 3; ++a4) {
                            const std::array<double, 5> vals = {
                                std::pow(10.0, cand[0][a0]), std::pow(10.0, cand[1][a1]),
                                std::pow(10.0, cand[2][a2]), std::pow(10.0, cand[3][a3]),
                                std::pow(10.0, cand[4][a4])};
                            const double v = cell_objective(g, fixed, vals[0], vals[1], vals[2],
                                                            vals[3], vals[4]);
                            if (v > best_ref) {
                                best_ref = v;
                                best_vals = vals;
                            }
                        }

        out.feasible = true;
        out.best = make_certificate(
            g, cell_params(fixed, best_vals[0], best_vals[1], best_vals[2], best_vals[3],
                           best_vals[4]));
        return out;
    }

    // Infeasible: walk the conditions in order and report the first one that
    // cannot hold given the ones before it, with its tightest violation.
    const double inf = std::numeric_limits<double>::infinity();
    std::array<double, 4> stage_min = {inf, inf, inf, inf};
    for (int i0 = 0; i0 < p; ++i0)
        for (int i1 = 0; i1 < p; ++i1)
            for (int i2 = 0; i2 < p; ++i2)
                for (int i3 = 0; i3 < p; ++i3)
                    for (int i4 = 0; i4 < p; ++i4) {
                        const ConditionMargins m =
                            margins(g, ax.value(i0), ax.value(i1), ax.value(i2), fixed.omega2,
                                    ax.value(i3), fixed.tau_hat, ax.value(i4));
                        stage_min[0] = std::min(stage_min[0], m.v_eps2);
                        if (!(m.v_eps2 < 0.0)) continue;
                        stage_min[1] = std::min(stage_min[1], m.v_lambda);
                        if (!(m.v_lambda < 0.0)) continue;
                        stage_min[2] = std::min(stage_min[2], m.v_omega3);
                        if (!(m.v_omega3 < 0.0)) continue;
                        stage_min[3] = std::min(stage_min[3], m.v_tau_tilde);
                    }
    out.feasible = false;
    for (int c = 0; c < 4; ++c) {
        if (!(stage_min[c] < 0.0)) {
            out.blocking_condition = c;
            out.blocking_name = condition_name(c);
            out.blocking_margin = stage_min[c];
            break;
        }
    }
    return out;
}

}  // namespace

SearchOutcome feasibility_search(const ControllerGains& g, const SearchFixed& fixed,
                                 const SearchGrid& grid) {
    return run_search(g, fixed, grid, true);
}

SearchOutcome feasibility_search_serial(const ControllerGains& g, const SearchFixed& fixed,
                                        const SearchGrid& grid) {
    return run_search(g, fixed, grid, false);
}

}  // namespace poscade
