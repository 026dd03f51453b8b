#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace poscade {

/// Logistic input saturation g(u) = beta / (1 + exp(-k_s (u - eta))).
/// Output is confined to (0, beta) for finite u.
struct SaturationParams {
    double beta = 50.0;   // maximum output, input units
    double k_s = 0.0224;  // growth rate, 1/input units
    double eta = 75.0;    // horizontal shift, input units

    void validate() const;
};

double eval_saturation(const SaturationParams& p, double u);

/// State-dependent power-law input lag tau(x_n) = gamma * x_n^(-k_d).
struct DelayLaw {
    double gamma = 4.48;  // time * state^k_d
    double k_d = 0.322;   // dimensionless exponent
    double phi1 = 1e-3;   // strict positivity floor on x_n
    double phi2 = 4.0;    // admissible bound on |tau_dot|

    void validate() const;
    /// Slew bound consistency: phi2 must exceed d_n * k_d * gamma * phi1^(-k_d).
    double phi2_lower_bound(double d_n) const;
    void validate_slew(double d_n) const;
    /// Largest lag over the admissible state range, gamma * phi1^(-k_d).
    double tau_max() const;
};

double eval_delay(const DelayLaw& law, double x_n);

class StateDerivs;

/// Non-negative coupling map with total-time-derivative oracles along the flow.
/// `time_derivative(table, j)` must return the j-th derivative of the map
/// evaluated on a state whose own derivatives are supplied by `table`
/// (orders below j are always filled before the call).
struct CouplingMap {
    std::function<double(std::span<const double>)> value;
    std::function<double(const StateDerivs&, int)> time_derivative;
    int max_derivative_order = 0;
};

/// Cascading plant: xdot_i = x_{i+1} - d_i x_i + H_i(x) for i < n,
/// xdot_n = -d_n x_n + F(x) + (saturated delayed input).
struct CascadeParams {
    int n = 3;
    std::vector<double> d;
    std::vector<CouplingMap> h_maps;  // empty or size n-1; absent entries are zero maps
    std::optional<CouplingMap> f_map;

    void validate() const;
    bool has_h(int i) const;  // i is 1-based state index
    double eval_h(int i, std::span<const double> x) const;
    double eval_f(std::span<const double> x) const;
};

/// Table of state time-derivatives D(i, m) = x_i^{(m)}, filled by increasing m.
class StateDerivs {
public:
    StateDerivs(int n, int max_order);
    double get(int state_index, int order) const;  // 1-based state index
    void set(int state_index, int order, double v);
    int order() const { return max_order_; }
    int states() const { return n_; }

private:
    int n_ = 0;
    int max_order_ = 0;
    std::vector<double> v_;
};

struct MetzlerReport {
    bool is_metzler = false;
    std::vector<std::vector<double>> a;  // the n x n system matrix
    std::string text;                    // row-by-row listing
};

/// Builds the bidiagonal system matrix (-d_i diagonal, unit superdiagonal)
/// and checks all off-diagonal entries are non-negative.
MetzlerReport metzler_check(const CascadeParams& p);

/// Plant right-hand side for a given (already saturated, already delayed)
/// input value applied to the n-th state.
std::vector<double> rhs(const CascadeParams& p, std::span<const double> x, double g_u_tau);

/// Fills x_i^{(m)} for every entry computable from the state alone,
/// plus x_n^{(1)} when the forcing term is supplied.
StateDerivs build_state_derivs(const CascadeParams& p, std::span<const double> x,
                               int max_order, std::optional<double> g_u_tau);

/// j-th time derivative of x_1 by repeated substitution of the cascade
/// equations. Orders below n need no input; order n requires the saturated
/// delayed input value.
double x1_derivative_chain(const CascadeParams& p, std::span<const double> x, int order,
                           std::optional<double> g_u_tau = std::nullopt);

/// Derivatives [x_1^{(0)}, ..., x_1^{(max_order)}] in one table pass.
std::vector<double> x1_derivatives(const CascadeParams& p, std::span<const double> x,
                                   int max_order, std::optional<double> g_u_tau = std::nullopt);

/// Plant state plus the compensator state at one time instant.
struct StateVector {
    std::vector<double> x;
    double nu = 0.0;
    double t = 0.0;
};

/// Coagulation instance used by the bundled scenarios: a linear third-order
/// cascade fitted to a trauma patient plasma sample, no coupling maps.
CascadeParams trauma_sample_plant();

}  // namespace poscade
