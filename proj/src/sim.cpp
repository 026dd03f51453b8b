#include "poscade/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace poscade {

void SimConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("sim.dt must be > 0");
    if (!(t_end > dt)) throw std::invalid_argument("sim.t_end must exceed sim.dt");
    if (record_stride < 1) throw std::invalid_argument("sim.record_stride must be >= 1");
    if (!(positivity_tol >= 0.0)) throw std::invalid_argument("sim.positivity_tol must be >= 0");
}

namespace {

// coupling maps must stay non-negative on the positive orthant; checked by
// sampling since they are arbitrary user callables
void spot_check_coupling(const CascadeParams& p) {
    if (p.h_maps.empty() && !p.f_map) return;
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> u(0.0, 1000.0);
    std::vector<double> x(p.n);
    for (int trial = 0; trial < 64; ++trial) {
        for (double& v : x) v = u(rng);
        if (trial % 4 == 0) x[trial / 4 % p.n] = 0.0;  // include boundary points
        for (int i = 1; i <= p.n - 1; ++i)
            if (!(p.eval_h(i, x) >= 0.0))
                throw std::invalid_argument("plant.h_maps[" + std::to_string(i - 1) +
                                            "] is negative on the positive orthant");
        if (!(p.eval_f(x) >= 0.0))
            throw std::invalid_argument("plant.f_map is negative on the positive orthant");
    }
}

}  // namespace

void validate_setup(const SystemSetup& setup, const SimConfig& config) {
    config.validate();
    setup.plant.validate();
    spot_check_coupling(setup.plant);
    if (config.enable_saturation) setup.saturation.validate();
    if (static_cast<int>(setup.x0.size()) != setup.plant.n)
        throw std::invalid_argument("x0 must have exactly n entries");
    for (int i = 0; i < setup.plant.n; ++i)
        if (!(setup.x0[i] >= 0.0)) throw std::invalid_argument("x0 entries must be >= 0");
    if (setup.controller_enabled) setup.gains.validate();
    if (config.enable_delay) {
        setup.delay.validate();
        setup.delay.validate_slew(setup.plant.d.back());
        if (setup.controller_enabled) setup.estimate.validate();
        if (!(setup.x0.back() > 0.0))
            throw std::invalid_argument("x0[n-1] must be > 0 when the delay path is active");
        // lag resolution guard: several steps must fit inside the shortest
        // expected lag, otherwise delayed lookups are under-resolved
        double xn_max = config.x_n_max_expected;
        if (xn_max <= 0.0) {
            xn_max = setup.x0.back();
            if (config.enable_saturation)
                xn_max = std::max(xn_max, 2.0 * setup.saturation.beta / setup.plant.d.back());
        }
        const double tau_min = eval_delay(setup.delay, xn_max);
        // a lag much shorter than the system dynamics needs no extra
        // resolution, so the fastest decay rate caps the requirement
        const double d_max = *std::max_element(setup.plant.d.begin(), setup.plant.d.end());
        const double bound = std::max(tau_min / 5.0, 1.0 / (50.0 * std::max(d_max, 1e-12)));
        if (!(config.dt <= bound)) {
            std::ostringstream os;
            os << "sim.dt must be <= tau_min/5 with the delay enabled: " << config.dt << " > "
               << bound;
            throw std::invalid_argument(os.str());
        }
    }
}

double delayed_forcing(const InputHistory& h, double t, double tau,
                       const SaturationParams* sat, StageSide stage) {
    const double u_del = h.sample_at_stage(t - tau, stage);
    return sat ? eval_saturation(*sat, u_del) : u_del;
}

ClosedLoopSim::ClosedLoopSim(SystemSetup setup, ReferenceTrajectory reference, SimConfig config)
    : setup_(std::move(setup)),
      reference_(std::move(reference)),
      config_(config),
      coeffs_(CascadeCoefficients::compute(setup_.plant.n)) {
    validate_setup(setup_, config_);
    if (reference_.max_order() < setup_.plant.n + 1)
        throw std::invalid_argument("reference must provide derivatives to order n+1");
    total_steps_ = std::llround(config_.t_end / config_.dt);

    state_.x = setup_.x0;
    state_.nu = 0.0;
    state_.t = 0.0;
    y_ = state_.x;
    y_.push_back(state_.nu);

    commit_frame(0.0);
    if (setup_.controller_enabled) {
        cs_.initialize(frame_.e[setup_.plant.n - 1]);
        cs_.nu = 0.0;
        decision_ = control_output(cs_, setup_.gains, frame_.e[setup_.plant.n - 1], frame_.e[0]);
    } else {
        decision_ = ControlDecision{};
    }
    gate_prev_ = decision_.gate;
    history_.append(0.0, decision_.u);
}

void ClosedLoopSim::stage_derivative(double t, const std::vector<double>& y, StageSide side,
                                     std::vector<double>& dydt) {
    const int n = setup_.plant.n;
    const std::span<const double> x(y.data(), static_cast<std::size_t>(n));
    const double tau = config_.enable_delay ? eval_delay(setup_.delay, x[n - 1]) : 0.0;
    const double forcing = delayed_forcing(
        history_, t, tau, config_.enable_saturation ? &setup_.saturation : nullptr, side);
    const std::vector<double> dx = rhs(setup_.plant, x, forcing);
    dydt.assign(dx.begin(), dx.end());
    double nu_dot = 0.0;
    if (setup_.controller_enabled) {
        const std::vector<double> x1d = x1_derivatives(setup_.plant, x, n - 1);
        std::vector<double> e1d(n);
        for (int j = 0; j < n; ++j) e1d[j] = reference_.eval(t, j) - x1d[j];
        const std::vector<double> e = tracking_errors(coeffs_, e1d);
        const double e_u = compute_e_u(history_, t, setup_.estimate.tau_hat);
        nu_dot = nu_rate(setup_.gains, e[n - 1], e_u);
    }
    dydt.push_back(nu_dot);
}

void ClosedLoopSim::commit_frame(double t) {
    const int n = setup_.plant.n;
    const std::span<const double> x(y_.data(), static_cast<std::size_t>(n));
    tau_at_commit_ = config_.enable_delay ? eval_delay(setup_.delay, x[n - 1]) : 0.0;
    forcing_at_commit_ = delayed_forcing(
        history_, t, tau_at_commit_, config_.enable_saturation ? &setup_.saturation : nullptr,
        StageSide::Interior);

    const std::vector<double> x1d = x1_derivatives(setup_.plant, x, n, forcing_at_commit_);
    std::vector<double> e1d(n + 1);
    for (int j = 0; j <= n; ++j) e1d[j] = reference_.eval(t, j) - x1d[j];
    frame_.t = t;
    frame_.e = tracking_errors(coeffs_, std::span<const double>(e1d.data(), n));
    frame_.e_n_rate = error_rate(coeffs_, n, e1d);
    frame_.e_u = setup_.controller_enabled
                     ? compute_e_u(history_, t, setup_.estimate.tau_hat)
                     : 0.0;
    frame_.e_a = compute_e_a(frame_.e_n_rate, frame_.e[n - 1], frame_.e_u, setup_.gains.lambda,
                             setup_.gains.alpha);

    if (config_.psi_tripwire > 0.0 && config_.monitor_enabled &&
        !(frame_.z_norm() < config_.psi_tripwire)) {
        std::ostringstream os;
        os << "stacked error norm exceeded psi at t=" << t << " (" << frame_.z_norm() << ")";
        throw SimulationError(os.str());
    }
}

void ClosedLoopSim::step() {
    if (done()) throw std::logic_error("simulation horizon already reached");
    const int n = setup_.plant.n;
    const double t0 = step_index_ * config_.dt;
    const double t1 = (step_index_ + 1) * config_.dt;

    rk4_step(y_, t0, t1, [this](double t, const std::vector<double>& y, StageSide side,
                                std::vector<double>& dydt) { stage_derivative(t, y, side, dydt); },
             ws_);

    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(y_[i]))
            throw SimulationError("non-finite state component at t=" + std::to_string(t1));
        if (y_[i] < 0.0) {
            if (y_[i] < -config_.positivity_tol) {
                std::ostringstream os;
                os << "positivity violation at t=" << t1 << ": x" << (i + 1) << " = " << y_[i];
                throw SimulationError(os.str());
            }
            y_[i] = 0.0;
            ++counters_.positivity_clamps;
        }
    }
    if (!std::isfinite(y_[n]))
        throw SimulationError("non-finite compensator state at t=" + std::to_string(t1));
    if (config_.enable_delay && setup_.controller_enabled && !(y_[n - 1] > setup_.delay.phi1)) {
        std::ostringstream os;
        os << "x_n fell to its strict floor at t=" << t1 << ": " << y_[n - 1]
           << " <= " << setup_.delay.phi1;
        throw SimulationError(os.str());
    }

    state_.x.assign(y_.begin(), y_.begin() + n);
    state_.nu = y_[n];
    state_.t = t1;

    commit_frame(t1);
    if (setup_.controller_enabled) {
        cs_.nu = state_.nu;
        decision_ = control_output(cs_, setup_.gains, frame_.e[n - 1], frame_.e[0]);
        if (decision_.clamped) ++counters_.clamp_events;
        if (decision_.gate != gate_prev_) {
            ++counters_.switch_count;
            if (decision_.gate == 1) ++counters_.rising_edges;
            gate_prev_ = decision_.gate;
        }
    } else {
        decision_ = ControlDecision{};
    }
    history_.append(t1, decision_.u);
    // lookups never reach further back than the lag supremum plus the
    // estimate window; anything older can be dropped
    const double tau_reach = config_.enable_delay ? setup_.delay.tau_max() : 0.0;
    history_.truncate_before(t1 - (tau_reach + setup_.estimate.tau_hat + 1.0));
    ++step_index_;
}

TrajectoryRow ClosedLoopSim::record_row() const {
    TrajectoryRow r;
    r.t = state_.t;
    r.x = state_.x;
    r.x_r = reference_.eval(state_.t, 0);
    r.e = frame_.e;
    r.e_u = frame_.e_u;
    r.e_a = frame_.e_a;
    r.u_raw = decision_.u_raw;
    r.u_applied = decision_.u;
    r.g_u_tau = forcing_at_commit_;
    r.tau = tau_at_commit_;
    r.tau_hat = setup_.controller_enabled ? setup_.estimate.tau_hat : 0.0;
    r.nu = state_.nu;
    r.gate = decision_.gate;
    r.clamp_flag = decision_.clamped ? 1 : 0;
    return r;
}

Trajectory run_scenario(const SystemSetup& setup, const ReferenceTrajectory& reference,
                        const SimConfig& config, double settling_band) {
    ClosedLoopSim sim(setup, reference, config);
    Trajectory traj;
    traj.n = setup.plant.n;
    traj.dt = config.dt;
    traj.record_dt = config.dt * config.record_stride;
    traj.t_end = config.t_end;
    traj.rows.reserve(static_cast<std::size_t>(sim.total_steps() / config.record_stride) + 2);
    traj.rows.push_back(sim.record_row());
    while (!sim.done()) {
        sim.step();
        if (sim.step_index() % config.record_stride == 0)
            traj.rows.push_back(sim.record_row());
    }
    if (config.monitor_enabled && setup.controller_enabled)
        lyapunov_eval(traj, config.lk, setup.gains, setup.estimate.tau_hat,
                      setup.estimate.tau_tilde_bar);
    traj.metrics = compute_metrics(traj, settling_band);
    traj.metrics.switch_count = sim.counters().switch_count;
    traj.metrics.rising_edges = sim.counters().rising_edges;
    traj.metrics.clamp_events = sim.counters().clamp_events;
    traj.metrics.positivity_clamps = sim.counters().positivity_clamps;
    return traj;
}

namespace {

// trapezoid of the sampled integrand f(j) over [a, t_row] on the uniform
// recorded grid; the integrand is zero before the grid start and the lower
// edge cell is split by linear interpolation
template <class F>
double window_integral(F&& f, double t0, double dt, long row, double a) {
    const double b = t0 + row * dt;
    if (!(b > a)) return 0.0;
    if (a < t0) a = t0;  // pre-history contributes nothing
    const double offset = (a - t0) / dt;
    long j0 = static_cast<long>(std::floor(offset));
    if (j0 >= row) return 0.0;
    double acc = 0.0;
    const double frac = offset - j0;
    if (frac > 0.0) {
        const double fa = f(j0) + frac * (f(j0 + 1) - f(j0));
        acc += 0.5 * (fa + f(j0 + 1)) * (1.0 - frac) * dt;
        ++j0;
    }
    for (long j = j0; j < row; ++j) acc += 0.5 * (f(j) + f(j + 1)) * dt;
    return acc;
}

struct MonitorInputs {
    std::vector<double> ea2;   // e_a^2 per row
    std::vector<double> ud2;   // (gate * k * e_a)^2 per row
};

MonitorInputs monitor_inputs(const Trajectory& traj, double k) {
    MonitorInputs mi;
    mi.ea2.resize(traj.rows.size());
    mi.ud2.resize(traj.rows.size());
    for (std::size_t j = 0; j < traj.rows.size(); ++j) {
        const TrajectoryRow& r = traj.rows[j];
        mi.ea2[j] = r.e_a * r.e_a;
        const double ud = r.gate * k * r.e_a;
        mi.ud2[j] = ud * ud;
    }
    return mi;
}

void monitor_row(Trajectory& traj, const MonitorInputs& mi, const LkWeights& w, double tau_hat,
                 double span3, long j) {
    TrajectoryRow& r = traj.rows[j];
    const double t0 = traj.rows.front().t;
    const double dt = traj.record_dt;
    const auto ea2 = [&](long q) { return mi.ea2[q]; };
    r.Q1 = w.omega1 * window_integral(ea2, t0, dt, j, r.t - tau_hat);
    r.Q2 = r.tau > 0.0 ? w.omega2 * window_integral(ea2, t0, dt, j, r.t - r.tau) : 0.0;
    // double integral over the (tau_tilde_bar + tau_hat) window collapses to
    // a single integral weighted by the distance from the window start
    const double a3 = r.t - span3;
    const auto weighted = [&](long q) {
        const double theta = t0 + q * dt;
        return theta > a3 ? (theta - a3) * mi.ud2[q] : 0.0;
    };
    r.Q3 = w.omega3 * window_integral(weighted, t0, dt, j, a3);
    double quad = r.e_a * r.e_a + r.e_u * r.e_u;
    for (double e : r.e) quad += e * e;
    r.V = 0.5 * quad + r.Q1 + r.Q2 + r.Q3;
}

void run_monitor(Trajectory& traj, const LkWeights& w, const ControllerGains& g, double tau_hat,
                 double tau_tilde_bar, bool parallel) {
    if (traj.rows.empty()) throw std::invalid_argument("monitor needs a non-empty trajectory");
    if (!(tau_hat > 0.0)) throw std::invalid_argument("monitor requires tau_hat > 0");
    const double span3 = tau_tilde_bar + tau_hat;
    double longest = span3;
    for (const TrajectoryRow& r : traj.rows) longest = std::max(longest, r.tau);
    const double covered = traj.rows.back().t - traj.rows.front().t;
    if (covered < longest) {
        std::ostringstream os;
        os << "monitor window " << longest << " exceeds the recorded span " << covered;
        throw std::invalid_argument(os.str());
    }
    const MonitorInputs mi = monitor_inputs(traj, g.k);
    const long rows = static_cast<long>(traj.rows.size());
#pragma omp parallel for schedule(static) if (parallel)
    for (long j = 0; j < rows; ++j) monitor_row(traj, mi, w, tau_hat, span3, j);
}

}  // namespace

void lyapunov_eval(Trajectory& traj, const LkWeights& w, const ControllerGains& g,
                   double tau_hat, double tau_tilde_bar) {
    run_monitor(traj, w, g, tau_hat, tau_tilde_bar, true);
}

void lyapunov_eval_serial(Trajectory& traj, const LkWeights& w, const ControllerGains& g,
                          double tau_hat, double tau_tilde_bar) {
    run_monitor(traj, w, g, tau_hat, tau_tilde_bar, false);
}

Metrics compute_metrics(const Trajectory& traj, double settling_band) {
    if (traj.rows.empty()) throw std::invalid_argument("metrics need a non-empty trajectory");
    Metrics m;
    for (std::size_t j = 0; j + 1 < traj.rows.size(); ++j) {
        const double a = traj.rows[j].e[0];
        const double b = traj.rows[j + 1].e[0];
        m.ise += 0.5 * (a * a + b * b) * traj.record_dt;
    }
    const double t_tail = traj.rows.front().t + 0.8 * (traj.t_end - traj.rows.front().t);
    for (const TrajectoryRow& r : traj.rows)
        if (r.t >= t_tail) m.ultimate_band = std::max(m.ultimate_band, std::abs(r.e[0]));
    if (settling_band > 0.0) {
        long last_outside = -1;
        for (long j = 0; j < static_cast<long>(traj.rows.size()); ++j)
            if (std::abs(traj.rows[j].e[0]) > settling_band) last_outside = j;
        if (last_outside + 1 < static_cast<long>(traj.rows.size()))
            m.settling_time = traj.rows[last_outside + 1].t;
    }
    return m;
}

}  // namespace poscade
