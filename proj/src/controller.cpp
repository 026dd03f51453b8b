#include "poscade/controller.hpp"

#include <cmath>
#include <stdexcept>

namespace poscade {

void ControllerGains::validate() const {
    if (!(k > 0.0)) throw std::invalid_argument("gains.k must be > 0");
    if (!(lambda > 0.0)) throw std::invalid_argument("gains.lambda must be > 0");
    if (!(alpha > 0.0)) throw std::invalid_argument("gains.alpha must be > 0");
}

DelayEstimate DelayEstimate::from_initial_state(double gamma_hat, double k_d_hat, double x_n0,
                                                double tau_tilde_bar) {
    if (!(x_n0 > 0.0))
        throw std::invalid_argument("delay estimate requires a positive initial x_n");
    DelayEstimate e;
    e.gamma_hat = gamma_hat;
    e.k_d_hat = k_d_hat;
    e.tau_hat = gamma_hat * std::pow(x_n0, -k_d_hat);
    e.tau_tilde_bar = tau_tilde_bar;
    e.validate();
    return e;
}

void DelayEstimate::validate() const {
    if (!(gamma_hat > 0.0)) throw std::invalid_argument("delay_estimate.gamma_hat must be > 0");
    if (!(k_d_hat > 0.0)) throw std::invalid_argument("delay_estimate.k_d_hat must be > 0");
    if (!(tau_hat > 0.0)) throw std::invalid_argument("delay_estimate.tau_hat must be > 0");
    if (!(tau_tilde_bar >= 0.0))
        throw std::invalid_argument("delay_estimate.tau_tilde_bar must be >= 0");
}

int gate(double e1) {
    return e1 >= 0.0 ? 1 : 0;
}

void ControllerState::initialize(double e_n_at_t0) {
    e_n_t0 = e_n_at_t0;
    nu = 0.0;
    initialized = true;
}

ControlDecision control_output(const ControllerState& cs, const ControllerGains& g, double e_n,
                               double e1) {
    if (!cs.initialized)
        throw std::logic_error("controller state must be initialized before use");
    ControlDecision d;
    d.gate = gate(e1);
    d.u_raw = d.gate * (g.k * (e_n - cs.e_n_t0) + cs.nu);
    d.clamped = d.gate == 1 && d.u_raw < 0.0;
    d.u = d.clamped ? 0.0 : d.u_raw;
    return d;
}

double nu_rate(const ControllerGains& g, double e_n, double e_u) {
    return g.k * (g.lambda * e_n + g.alpha * e_u);
}

double u_dot_model(const ControllerGains& g, double e1, double e_a) {
    return gate(e1) * g.k * e_a;
}

}  // namespace poscade
