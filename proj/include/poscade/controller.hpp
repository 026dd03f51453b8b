#pragma once

namespace poscade {

struct ControllerGains {
    double k = 0.15;
    double lambda = 0.1;
    double alpha = 5.0;

    void validate() const;
};

/// Frozen power-law delay estimate tau_hat = gamma_hat * x_n(0)^(-k_d_hat),
/// fixed over a run, plus the assumed quality bound on |tau - tau_hat|.
struct DelayEstimate {
    double gamma_hat = 1.0;
    double k_d_hat = 1.0;
    double tau_hat = 0.0;
    double tau_tilde_bar = 0.0;

    static DelayEstimate from_initial_state(double gamma_hat, double k_d_hat, double x_n0,
                                            double tau_tilde_bar);
    void validate() const;
};

/// Signum gate sgn((sgn(e_1)+1)/2): 1 for e_1 >= 0 (boost allowed),
/// 0 for e_1 < 0 (rely on natural decay). The e_1 = 0 case resolves to 1
/// through the nested composition since sgn(1/2) = 1.
int gate(double e1);

struct ControlDecision {
    double u_raw = 0.0;  // gate * (k (e_n - e_n(t0)) + nu) before clamping
    double u = 0.0;      // applied value, never negative
    bool clamped = false;
    int gate = 0;
};

/// Compensator state. nu integrates unconditionally (also while the gate is
/// off); e_n_t0 is captured at the first controller invocation.
struct ControllerState {
    double nu = 0.0;
    double e_n_t0 = 0.0;
    bool initialized = false;

    void initialize(double e_n_at_t0);
};

/// Switching control law: u = gate(e_1) * (k (e_n - e_n(t0)) + nu), clamped
/// at zero from below to honour the non-negative input requirement.
ControlDecision control_output(const ControllerState& cs, const ControllerGains& g, double e_n,
                               double e1);

/// Compensator dynamics nu_dot = k (lambda e_n + alpha e_u).
double nu_rate(const ControllerGains& g, double e_n, double e_u);

/// Distribution-theoretic derivative of the control law: the delta terms at
/// the switch vanish identically, leaving gate(e_1) * k * e_a.
double u_dot_model(const ControllerGains& g, double e1, double e_a);

}  // namespace poscade
