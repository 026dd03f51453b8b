// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Criteria 4-7 probe the tracking claims of the bundled
// trauma-sample scenarios; with that parameter set the saturation ceiling
// caps the reachable output below the case-1/case-2 reference levels
// (sup x1 = beta/(d1 d2 d3) ~ 142.7), so those checks document the gap
// rather than being attainable. See README, "Known results".

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "poscade/certify.hpp"
#include "poscade/errcascade.hpp"
#include "poscade/scenario.hpp"
#include "poscade/sim.hpp"

using namespace poscade;

namespace {

int g_failures = 0;

void report(int id, const std::string& label, bool pass, const std::string& detail) {
    std::printf("%s criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", id, label.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

Trajectory run_preset_dense(const std::string& name) {
    ScenarioConfig cfg = preset(name);
    cfg.sim.record_stride = 1;
    return run_scenario(cfg.build_setup(), cfg.reference.build(), cfg.sim, cfg.settling_band);
}

// ---------------------------------------------------------------- criterion 1

void criterion_positivity(const std::vector<Trajectory>& presets,
                          std::chrono::steady_clock::time_point t0) {
    long bad_states = 0, bad_inputs = 0, failed_runs = 0;

    for (const Trajectory& traj : presets) {
        for (const TrajectoryRow& r : traj.rows) {
            for (double x : r.x)
                if (!(x >= -1e-9)) ++bad_states;
            if (!(r.u_applied >= 0.0)) ++bad_inputs;
        }
    }

    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> expo(std::log10(0.1), std::log10(600.0));
    std::vector<std::vector<double>> starts(100);
    for (auto& x0 : starts)
        x0 = {std::pow(10.0, expo(rng)), std::pow(10.0, expo(rng)), std::pow(10.0, expo(rng))};

    std::vector<long> state_viol(starts.size(), 0), input_viol(starts.size(), 0),
        run_fail(starts.size(), 0);
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(starts.size()); ++i) {
        ScenarioConfig cfg = preset("case1_1");
        cfg.x0 = starts[i];
        cfg.sim.monitor_enabled = false;
        try {
            const Trajectory traj =
                run_scenario(cfg.build_setup(), cfg.reference.build(), cfg.sim);
            for (const TrajectoryRow& r : traj.rows) {
                for (double x : r.x)
                    if (!(x >= -1e-9)) ++state_viol[i];
                if (!(r.u_applied >= 0.0)) ++input_viol[i];
            }
        } catch (const std::exception&) {
            run_fail[i] = 1;
        }
    }
    for (std::size_t i = 0; i < starts.size(); ++i) {
        bad_states += state_viol[i];
        bad_inputs += input_viol[i];
        failed_runs += run_fail[i];
    }

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = bad_states == 0 && bad_inputs == 0 && failed_runs == 0 && elapsed <= 60.0;
    report(1, "positivity across presets and 100 random starts", pass,
           fmt("state violations %ld, input violations %ld, aborted runs %ld, %.1f s",
               bad_states, bad_inputs, failed_runs, elapsed));
}

// ---------------------------------------------------------------- criterion 2

std::vector<std::vector<std::int64_t>> expand_recursion(int n) {
    std::vector<std::vector<std::int64_t>> e(n + 1);
    e[1] = {1};
    for (int k = 2; k <= n; ++k) {
        std::vector<std::int64_t> v(k, 0);
        for (std::size_t j = 0; j < e[k - 1].size(); ++j) {
            v[j + 1] += e[k - 1][j];
            v[j] += e[k - 1][j];
        }
        if (k >= 3)
            for (std::size_t j = 0; j < e[k - 2].size(); ++j) v[j] += e[k - 2][j];
        e[k] = v;
    }
    return e;
}

void criterion_coefficients() {
    bool ok = true;
    for (int n = 1; n <= 6 && ok; ++n) {
        const CascadeCoefficients c = CascadeCoefficients::compute(n);
        const auto oracle = expand_recursion(n);
        for (int i = 1; i <= n; ++i)
            for (int j = 0; j <= i - 1; ++j)
                if (c.at(i, j) != oracle[i][j]) ok = false;
    }
    const CascadeCoefficients c20 = CascadeCoefficients::compute(20);
    std::vector<std::int64_t> fib{0, 1, 1};
    for (int i = 3; i <= 20; ++i) fib.push_back(fib[i - 1] + fib[i - 2]);
    for (int i = 2; i <= 20; ++i)
        if (c20.at(i, 0) != fib[i]) ok = false;
    report(2, "error-cascade coefficients match symbolic expansion and Fibonacci", ok, "");
}

// ---------------------------------------------------------------- criterion 3

double run_fixture(double dt) {
    InputHistory h;
    const long n = std::llround(5.0 / dt);
    for (long i = 0; i <= n; ++i) h.append(i * dt, 1.0);
    std::vector<double> y{1.0};
    Rk4Workspace ws;
    for (long i = 0; i < n; ++i) {
        rk4_step(y, i * dt, (i + 1) * dt,
                 [&h](double t, const std::vector<double>& yy, StageSide side,
                      std::vector<double>& dydt) {
                     dydt.assign(1, -yy[0] + h.sample_at_stage(t - 1.0, side));
                 },
                 ws);
    }
    return y[0];
}

void criterion_integrator() {
    const double exact = 1.0 + (std::exp(-1.0) - 1.0) * std::exp(-4.0);
    const double rel = std::abs(run_fixture(1e-3) - exact) / std::abs(exact);
    const double e1 = std::abs(run_fixture(0.2) - exact);
    const double e2 = std::abs(run_fixture(0.1) - exact);
    const double e3 = std::abs(run_fixture(0.05) - exact);
    const double o1 = std::log2(e1 / e2);
    const double o2 = std::log2(e2 / e3);
    const bool pass = rel <= 1e-6 && o1 >= 1.9 && o2 >= 1.9;
    report(3, "constant-lag fixture matches the piecewise analytic solution", pass,
           fmt("rel err %.3g at dt=1e-3, observed orders %.2f / %.2f", rel, o1, o2));
}

// ------------------------------------------------------------- criteria 4-7

double saturation_cap() {
    const ScenarioConfig c = preset("case1_1");
    return c.saturation.beta / (c.d[0] * c.d[1] * c.d[2]);
}

void criterion_case1_1(const Trajectory& t11) {
    double worst = 0.0;
    for (const TrajectoryRow& r : t11.rows)
        if (r.t >= 80.0) worst = std::max(worst, std::abs(r.x[0] - 200.0));
    const bool band_ok = worst <= 20.0;
    const bool cycles_ok = t11.metrics.rising_edges >= 3;
    report(4, "case1_1 holds the 180..220 band late and cycles the gate", band_ok && cycles_ok,
           fmt("max |x1-200| on [80,100] = %.2f (need <= 20), rising edges %ld (need >= 3); "
               "reachable x1 is capped at %.2f by the input ceiling",
               worst, t11.metrics.rising_edges, saturation_cap()));
}

void criterion_case1_3(const Trajectory& t11, const Trajectory& t13) {
    double sup = 0.0;
    const std::size_t rows = std::min(t11.rows.size(), t13.rows.size());
    for (std::size_t j = 0; j < rows; ++j)
        sup = std::max(sup, std::abs(t11.rows[j].x[0] - t13.rows[j].x[0]));
    const bool pass = sup < 2.0;
    report(5, "case1_3 stays within 1% of case1_1 despite the poor estimate", pass,
           fmt("sup |x1 difference| = %.3f (need < 2); estimate feedback grows once the "
               "command winds up against the ceiling",
               sup));
}

void criterion_case1_4(const Trajectory& t11, const Trajectory& t14) {
    const bool ise_ok = t14.metrics.ise < t11.metrics.ise;
    const bool switch_ok = t14.metrics.switch_count > t11.metrics.switch_count;
    report(6, "case1_4 improves tracking and raises compensation frequency",
           ise_ok && switch_ok,
           fmt("ISE %.0f vs %.0f (improved: %s), switches %ld vs %ld (need more)",
               t14.metrics.ise, t11.metrics.ise, ise_ok ? "yes" : "no",
               t14.metrics.switch_count, t11.metrics.switch_count));
}

void criterion_case2(const Trajectory& t2) {
    const double period = 2.0 * std::acos(-1.0) / 0.15;
    double worst = 0.0;
    for (int m = 0;; ++m) {
        const double tc = (std::acos(-1.0) / 2.0 + m * std::acos(-1.0)) / 0.15;
        if (tc > t2.t_end) break;
        if (tc <= period) continue;
        const std::size_t j = static_cast<std::size_t>(std::llround(tc / t2.record_dt));
        if (j < t2.rows.size()) worst = std::max(worst, std::abs(t2.rows[j].e[0]));
    }
    double peak_forcing = 0.0;
    for (const TrajectoryRow& r : t2.rows)
        if (r.t > period) peak_forcing = std::max(peak_forcing, r.g_u_tau);
    const bool peaks_ok = worst <= 15.0;
    const bool ceiling_ok = peak_forcing >= 0.95 * 50.0;
    report(7, "case2 tracks the oscillation via saturated pulse-width modulation",
           peaks_ok && ceiling_ok,
           fmt("worst |e1| at peaks/troughs %.1f (need <= 15), peak applied forcing %.2f "
               "(need >= 47.5); the 200..400 reference band lies above the reachable cap %.2f",
               worst, peak_forcing, saturation_cap()));
}

// ---------------------------------------------------------------- criterion 8

void criterion_certificates() {
    bool ok = true;
    std::string note;

    const ControllerGains strong{100.0, 10.0, 0.1};
    AnalysisParams a;
    a.eps1 = 1.0;
    a.eps2 = 1.0;
    a.omega1 = 0.1;
    a.omega2 = 0.1;
    a.omega3 = 1e4;
    a.tau_hat = 0.01;
    a.tau_tilde_bar = 1e-5;
    if (std::abs(compute_sigma(strong, a) - 0.5) > 1e-12 * 0.5) {
        ok = false;
        note += "sigma oracle; ";
    }
    const ConditionFlags f = check_conditions(strong, a);
    if (!(f.eps2 && f.lambda && f.omega3 && !f.tau_tilde)) {
        ok = false;
        note += "flag arithmetic; ";
    }

    const ControllerGains g2{1.0, 10.0, 4.0};
    AnalysisParams b;
    b.eps1 = 4.0;
    b.eps2 = 1.0;
    b.omega1 = 1.0;
    b.omega2 = 1.0;
    b.omega3 = 100.0;
    b.tau_hat = 0.2;
    b.tau_tilde_bar = 0.05;
    if (std::abs(compute_delta(b, compute_sigma(g2, b), g2) - 0.125) > 1e-12 * 0.125) {
        ok = false;
        note += "delta oracle; ";
    }
    const ControllerGains g3{10.0, 100.0, 10.0};
    AnalysisParams bw = b;  // window term 1/(4*25) dominating
    bw.omega3 = 1e4;
    bw.tau_hat = 0.2;
    bw.tau_tilde_bar = 24.8;
    if (std::abs(compute_delta(bw, compute_sigma(g3, bw), g3) - 0.005) > 1e-12 * 0.005) {
        ok = false;
        note += "delta window oracle; ";
    }

    AnalysisParams c;
    c.c1 = 10.0;
    c.m = 1.0;
    c.tau_tilde_bar = 1.0;
    const auto uub = compute_uub(ControllerGains{0.15, 0.1, 5.0}, c, 0.005);
    if (!uub || std::abs(*uub - 233.09511649396117) > 1e-12 * 233.0) {
        ok = false;
        note += "uub oracle; ";
    }
    AnalysisParams zero = c;
    zero.c1 = 0.0;
    zero.tau_tilde_bar = 0.0;
    const auto uub0 = compute_uub(ControllerGains{1.0, 1.0, 1.0}, zero, 1.0);
    if (!uub0 || *uub0 != 0.0) {
        ok = false;
        note += "uub zero limit; ";
    }

    SearchFixed demo_fixed;
    demo_fixed.tau_hat = 0.2;  // the bundled scenarios' frozen estimate
    const SearchOutcome demo = feasibility_search(ControllerGains{0.15, 0.1, 5.0}, demo_fixed);
    if (demo.feasible || demo.blocking_name != "lambda") {
        ok = false;
        note += "demo gains should block on lambda; ";
    }

    SearchFixed feas_fixed;
    feas_fixed.tau_hat = 1e-5;
    const SearchOutcome found = feasibility_search(strong, feas_fixed);
    if (!found.feasible || !check_conditions(found.best.gains, found.best.params).all() ||
        !(found.best.delta > 0.0)) {
        ok = false;
        note += "feasible seed not found/verified; ";
    }

    report(8, "certificate arithmetic and feasibility search behave as derived", ok,
           ok ? fmt("demo gains infeasible (lambda margin %.4f), verified feasible point "
                    "delta %.3g at tau_hat=1e-5",
                    demo.blocking_margin, found.best.delta)
              : note);
}

// ---------------------------------------------------------------- criterion 9

void criterion_monitor(const std::vector<Trajectory>& presets) {
    const double cval = 2.0, tau_hat = 0.2, tau2 = 1.5, ttb = 3.0, k = 0.15;
    const LkWeights w{0.1, 0.1, 10.0};
    Trajectory traj;
    traj.n = 3;
    traj.dt = 0.01;
    traj.record_dt = 0.01;
    traj.t_end = 10.0;
    for (long j = 0; j <= 1000; ++j) {
        TrajectoryRow r;
        r.t = j * 0.01;
        r.x = {0.0, 0.0, 0.0};
        r.e = {0.0, 0.0, 0.0};
        r.e_a = cval;
        r.tau = tau2;
        r.gate = 1;
        traj.rows.push_back(r);
    }
    lyapunov_eval(traj, w, ControllerGains{k, 0.1, 5.0}, tau_hat, ttb);
    const TrajectoryRow& r = traj.rows.back();
    const double q1_ref = w.omega1 * cval * cval * tau_hat;
    const double q2_ref = w.omega2 * cval * cval * tau2;
    const double span = ttb + tau_hat;
    const double q3_ref = w.omega3 * (k * cval) * (k * cval) * span * span / 2.0;
    bool ok = std::abs(r.Q1 - q1_ref) <= 5e-3 * q1_ref &&
              std::abs(r.Q2 - q2_ref) <= 5e-3 * q2_ref &&
              std::abs(r.Q3 - q3_ref) <= 5e-3 * q3_ref;
    std::string note = fmt("Q1 %.4g/%.4g, Q2 %.4g/%.4g, Q3 %.4g/%.4g", r.Q1, q1_ref, r.Q2,
                           q2_ref, r.Q3, q3_ref);

    long negative = 0, nonfinite = 0;
    for (const Trajectory& t : presets)
        for (const TrajectoryRow& row : t.rows) {
            if (row.V < 0.0) ++negative;
            if (!std::isfinite(row.V)) ++nonfinite;
        }
    if (negative || nonfinite) {
        ok = false;
        note += fmt("; V<0 on %ld rows, non-finite on %ld", negative, nonfinite);
    }
    report(9, "energy monitor reproduces analytic windows and stays non-negative", ok, note);
}

// --------------------------------------------------------------- criterion 10

void criterion_determinism() {
    // summaries pinned from the first verified run of the default presets
    const double kGoldIse11 = 688579.9186901985;
    const double kGoldBand11 = 62.11594833058419;
    const long kGoldSwitches11 = 1;
    const double kGoldIse2 = 6850029.102743164;
    const double kGoldBand2 = 257.3305702270086;

    const ScenarioConfig cfg = preset("case1_1");
    const SystemSetup setup = cfg.build_setup();
    SimConfig sc = cfg.sim;
    sc.lk = LkWeights{cfg.analysis.omega1, cfg.analysis.omega2, cfg.analysis.omega3};
    sc.psi_tripwire = cfg.analysis.psi;
    const Trajectory a = run_scenario(setup, cfg.reference.build(), sc, cfg.settling_band);
    const Trajectory b = run_scenario(setup, cfg.reference.build(), sc, cfg.settling_band);
    const bool bytes_ok = trajectory_csv(a) == trajectory_csv(b);

    const ScenarioConfig cfg2 = preset("case2");
    SimConfig sc2 = cfg2.sim;
    sc2.lk = LkWeights{cfg2.analysis.omega1, cfg2.analysis.omega2, cfg2.analysis.omega3};
    sc2.psi_tripwire = cfg2.analysis.psi;
    const Trajectory t2 =
        run_scenario(cfg2.build_setup(), cfg2.reference.build(), sc2, cfg2.settling_band);

    auto close = [](double v, double gold) {
        return std::abs(v - gold) <= 1e-9 * std::abs(gold);
    };
    const bool golden_ok = close(a.metrics.ise, kGoldIse11) &&
                           close(a.metrics.ultimate_band, kGoldBand11) &&
                           a.metrics.switch_count == kGoldSwitches11 &&
                           close(t2.metrics.ise, kGoldIse2) &&
                           close(t2.metrics.ultimate_band, kGoldBand2);
    report(10, "byte-identical reruns and pinned golden summaries", bytes_ok && golden_ok,
           fmt("csv identical: %s; case1_1 ISE %.10g (gold %.10g), case2 ISE %.10g (gold %.10g)",
               bytes_ok ? "yes" : "no", a.metrics.ise, kGoldIse11, t2.metrics.ise, kGoldIse2));
}

}  // namespace

int main() {
    std::printf("acceptance suite\n----------------\n");
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<Trajectory> presets;
    presets.reserve(5);
    for (const std::string& name : preset_names()) presets.push_back(run_preset_dense(name));

    criterion_positivity(presets, t0);
    criterion_coefficients();
    criterion_integrator();
    criterion_case1_1(presets[0]);
    criterion_case1_3(presets[0], presets[2]);
    criterion_case1_4(presets[0], presets[3]);
    criterion_case2(presets[4]);
    criterion_certificates();
    criterion_monitor(presets);
    criterion_determinism();

    std::printf("----------------\n%d of 10 criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
