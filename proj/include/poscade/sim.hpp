#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "poscade/controller.hpp"
#include "poscade/errcascade.hpp"
#include "poscade/model.hpp"
#include "poscade/signals.hpp"

namespace poscade {

/// Raised when a run trips a state invariant (positivity, strict floor on
/// x_n, non-finite values, error-norm tripwire).
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LkWeights {
    double omega1 = 0.1;
    double omega2 = 0.1;
    double omega3 = 10.0;
};

struct SimConfig {
    double dt = 0.01;
    double t_end = 100.0;
    bool enable_saturation = true;
    bool enable_delay = true;
    int record_stride = 1;
    bool monitor_enabled = true;
    LkWeights lk;
    double positivity_tol = 1e-9;
    double psi_tripwire = 1e7;        // 0 disables the stacked-error bound check
    double x_n_max_expected = 0.0;    // 0 derives a default for the dt guard

    void validate() const;
};

/// Everything the closed loop needs besides the numerics config.
struct SystemSetup {
    CascadeParams plant;
    SaturationParams saturation;
    DelayLaw delay;
    DelayEstimate estimate;
    ControllerGains gains;
    bool controller_enabled = true;
    std::vector<double> x0;
};

/// Cross-field checks, including the lag-resolution guard
/// dt <= tau_min / 5 when the delay path is active.
void validate_setup(const SystemSetup& setup, const SimConfig& config);

struct TrajectoryRow {
    double t = 0.0;
    std::vector<double> x;
    double x_r = 0.0;
    std::vector<double> e;
    double e_u = 0.0;
    double e_a = 0.0;
    double u_raw = 0.0;
    double u_applied = 0.0;
    double g_u_tau = 0.0;
    double tau = 0.0;
    double tau_hat = 0.0;
    double nu = 0.0;
    int gate = 0;
    int clamp_flag = 0;
    double V = 0.0;
    double Q1 = 0.0;
    double Q2 = 0.0;
    double Q3 = 0.0;
};

struct Metrics {
    double ise = 0.0;
    double ultimate_band = 0.0;   // max |e_1| over the final 20% of the horizon
    double settling_time = -1.0;  // first time |e_1| stays inside the band; -1 if never
    long switch_count = 0;        // gate transitions in either direction
    long rising_edges = 0;        // off-to-on transitions
    long clamp_events = 0;        // steps where the raw command was clamped at 0
    long positivity_clamps = 0;   // states nudged from (-tol, 0) back to 0
};

struct Trajectory {
    int n = 0;
    double dt = 0.0;
    double record_dt = 0.0;
    double t_end = 0.0;
    std::vector<TrajectoryRow> rows;
    Metrics metrics;
};

struct Rk4Workspace {
    std::vector<double> k1, k2, k3, k4, tmp;
    void resize(std::size_t n) {
        k1.resize(n); k2.resize(n); k3.resize(n); k4.resize(n); tmp.resize(n);
    }
};

/// One classical Runge-Kutta step from t0 to t1. Callers supply both
/// endpoint times so grid-aligned breakpoints keep exact stage times; the
/// terminal stage is flagged so delayed lookups can use left limits there.
template <class Deriv>
void rk4_step(std::vector<double>& y, double t0, double t1, Deriv&& f, Rk4Workspace& ws) {
    const std::size_t n = y.size();
    const double h = t1 - t0;
    const double tm = t0 + 0.5 * h;
    ws.resize(n);
    f(t0, y, StageSide::Interior, ws.k1);
    for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = y[i] + 0.5 * h * ws.k1[i];
    f(tm, ws.tmp, StageSide::Interior, ws.k2);
    for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = y[i] + 0.5 * h * ws.k2[i];
    f(tm, ws.tmp, StageSide::Interior, ws.k3);
    for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = y[i] + h * ws.k3[i];
    f(t1, ws.tmp, StageSide::RightEndpoint, ws.k4);
    for (std::size_t i = 0; i < n; ++i)
        y[i] += h / 6.0 * (ws.k1[i] + 2.0 * ws.k2[i] + 2.0 * ws.k3[i] + ws.k4[i]);
}

/// Delayed, optionally saturated forcing seen by the n-th state at one stage.
double delayed_forcing(const InputHistory& h, double t, double tau,
                       const SaturationParams* sat, StageSide stage);

/// Fixed-step closed-loop integrator: plant and compensator advance together,
/// the lag is re-evaluated from the stage value of x_n, and the committed
/// control is appended to the input history after each step.
class ClosedLoopSim {
public:
    ClosedLoopSim(SystemSetup setup, ReferenceTrajectory reference, SimConfig config);

    void step();
    bool done() const { return step_index_ >= total_steps_; }
    long step_index() const { return step_index_; }
    long total_steps() const { return total_steps_; }

    const StateVector& state() const { return state_; }
    const InputHistory& history() const { return history_; }
    const ErrorFrame& frame() const { return frame_; }
    const ControlDecision& last_decision() const { return decision_; }
    const Metrics& counters() const { return counters_; }

    TrajectoryRow record_row() const;

private:
    void commit_frame(double t);
    void stage_derivative(double t, const std::vector<double>& y, StageSide side,
                          std::vector<double>& dydt);

    SystemSetup setup_;
    ReferenceTrajectory reference_;
    SimConfig config_;
    CascadeCoefficients coeffs_;
    InputHistory history_;
    ControllerState cs_;
    StateVector state_;
    ErrorFrame frame_;
    ControlDecision decision_;
    Metrics counters_;
    Rk4Workspace ws_;
    std::vector<double> y_;
    long step_index_ = 0;
    long total_steps_ = 0;
    int gate_prev_ = 1;
    double forcing_at_commit_ = 0.0;
    double tau_at_commit_ = 0.0;
};

/// Full deterministic run, including the energy monitor (when enabled) and
/// the trajectory metrics.
Trajectory run_scenario(const SystemSetup& setup, const ReferenceTrajectory& reference,
                        const SimConfig& config, double settling_band = 0.0);

/// Energy-functional monitor along a recorded trajectory: window integrals
/// Q1, Q2, Q3 by trapezoidal quadrature on the recorded grid (signals are
/// zero before the first sample) and the composite V per row. u_dot is
/// reconstructed from the recorded gate and e_a columns. Diagnostic only.
void lyapunov_eval(Trajectory& traj, const LkWeights& w, const ControllerGains& g,
                   double tau_hat, double tau_tilde_bar);
/// Serial reference path, kept for testing; identical results.
void lyapunov_eval_serial(Trajectory& traj, const LkWeights& w, const ControllerGains& g,
                          double tau_hat, double tau_tilde_bar);

/// ISE, ultimate band over the final 20%, settling time into +-band.
Metrics compute_metrics(const Trajectory& traj, double settling_band);

}  // namespace poscade
