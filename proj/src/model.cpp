#include "poscade/model.hpp"

#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace poscade {

void SaturationParams::validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("saturation.beta must be > 0");
    if (!(k_s > 0.0)) throw std::invalid_argument("saturation.k_s must be > 0");
    if (!(eta > 0.0)) throw std::invalid_argument("saturation.eta must be > 0");
    if (!(eta >= beta)) throw std::invalid_argument("saturation.eta must be >= saturation.beta");
}

double eval_saturation(const SaturationParams& p, double u) {
    assert(u >= 0.0 && "controller is expected to supply non-negative inputs");
    return p.beta / (1.0 + std::exp(-p.k_s * (u - p.eta)));
}

void DelayLaw::validate() const {
    if (!(gamma > 0.0)) throw std::invalid_argument("delay.gamma must be > 0");
    if (!(k_d > 0.0)) throw std::invalid_argument("delay.k_d must be > 0");
    if (!(phi1 > 0.0)) throw std::invalid_argument("delay.phi1 must be > 0");
    if (!(phi2 > 0.0)) throw std::invalid_argument("delay.phi2 must be > 0");
}

double DelayLaw::phi2_lower_bound(double d_n) const {
    return d_n * k_d * gamma * std::pow(phi1, -k_d);
}

void DelayLaw::validate_slew(double d_n) const {
    const double bound = phi2_lower_bound(d_n);
    if (!(phi2 > bound)) {
        std::ostringstream os;
        os << "delay.phi2 must exceed d_n*k_d*gamma*phi1^(-k_d): " << phi2 << " <= " << bound;
        throw std::invalid_argument(os.str());
    }
}

double DelayLaw::tau_max() const {
    return gamma * std::pow(phi1, -k_d);
}

double eval_delay(const DelayLaw& law, double x_n) {
    if (!(x_n > 0.0)) throw std::domain_error("eval_delay requires x_n > 0");
    return law.gamma * std::pow(x_n, -law.k_d);
}

void CascadeParams::validate() const {
    if (n < 2) throw std::invalid_argument("plant.n must be >= 2");
    if (static_cast<int>(d.size()) != n)
        throw std::invalid_argument("plant.d must have exactly n entries");
    for (int i = 0; i < n; ++i)
        if (!(d[i] >= 0.0)) throw std::invalid_argument("plant.d entries must be >= 0");
    if (!h_maps.empty() && static_cast<int>(h_maps.size()) != n - 1)
        throw std::invalid_argument("plant.h_maps must be empty or have n-1 entries");
}

bool CascadeParams::has_h(int i) const {
    return !h_maps.empty() && i >= 1 && i <= n - 1 && static_cast<bool>(h_maps[i - 1].value);
}

double CascadeParams::eval_h(int i, std::span<const double> x) const {
    return has_h(i) ? h_maps[i - 1].value(x) : 0.0;
}

double CascadeParams::eval_f(std::span<const double> x) const {
    return (f_map && f_map->value) ? f_map->value(x) : 0.0;
}

StateDerivs::StateDerivs(int n, int max_order)
    : n_(n), max_order_(max_order), v_(static_cast<size_t>(n) * (max_order + 1), 0.0) {}

double StateDerivs::get(int state_index, int order) const {
    assert(state_index >= 1 && state_index <= n_ && order >= 0 && order <= max_order_);
    return v_[static_cast<size_t>(state_index - 1) * (max_order_ + 1) + order];
}

void StateDerivs::set(int state_index, int order, double v) {
    assert(state_index >= 1 && state_index <= n_ && order >= 0 && order <= max_order_);
    v_[static_cast<size_t>(state_index - 1) * (max_order_ + 1) + order] = v;
}

MetzlerReport metzler_check(const CascadeParams& p) {
    p.validate();
    MetzlerReport rep;
    rep.a.assign(p.n, std::vector<double>(p.n, 0.0));
    for (int i = 0; i < p.n; ++i) {
        rep.a[i][i] = -p.d[i];
        if (i + 1 < p.n) rep.a[i][i + 1] = 1.0;
    }
    rep.is_metzler = true;
    for (int i = 0; i < p.n; ++i)
        for (int j = 0; j < p.n; ++j)
            if (i != j && rep.a[i][j] < 0.0) rep.is_metzler = false;
    std::ostringstream os;
    os << "A (" << p.n << "x" << p.n << ", -d_i diagonal, unit superdiagonal):\n";
    for (int i = 0; i < p.n; ++i) {
        os << "  [";
        for (int j = 0; j < p.n; ++j) os << (j ? ", " : " ") << rep.a[i][j];
        os << " ]\n";
    }
    os << (rep.is_metzler ? "Metzler: yes" : "Metzler: no");
    rep.text = os.str();
    return rep;
}

std::vector<double> rhs(const CascadeParams& p, std::span<const double> x, double g_u_tau) {
    if (static_cast<int>(x.size()) != p.n)
        throw std::invalid_argument("rhs: state dimension does not match plant order");
    std::vector<double> dx(p.n);
    for (int i = 1; i < p.n; ++i)
        dx[i - 1] = x[i] - p.d[i - 1] * x[i - 1] + p.eval_h(i, x);
    dx[p.n - 1] = -p.d[p.n - 1] * x[p.n - 1] + p.eval_f(x) + g_u_tau;
    return dx;
}

namespace {

double h_time_derivative(const CascadeParams& p, int i, int order, const StateDerivs& table,
                         std::span<const double> x) {
    if (!p.has_h(i)) return 0.0;
    if (order == 0) return p.eval_h(i, x);
    const CouplingMap& m = p.h_maps[i - 1];
    if (!m.time_derivative || order > m.max_derivative_order) {
        std::ostringstream os;
        os << "coupling map H_" << i << " lacks a derivative oracle of order " << order;
        throw std::invalid_argument(os.str());
    }
    return m.time_derivative(table, order);
}

}  // namespace

StateDerivs build_state_derivs(const CascadeParams& p, std::span<const double> x,
                               int max_order, std::optional<double> g_u_tau) {
    if (static_cast<int>(x.size()) != p.n)
        throw std::invalid_argument("build_state_derivs: state dimension mismatch");
    StateDerivs t(p.n, max_order);
    for (int i = 1; i <= p.n; ++i) t.set(i, 0, x[i - 1]);
    for (int m = 1; m <= max_order; ++m) {
        // x_i^{(m)} = x_{i+1}^{(m-1)} - d_i x_i^{(m-1)} + H_i^{(m-1)}; computable
        // from the state alone while i + m <= n + 1 stays inside the chain
        for (int i = 1; i <= p.n - m; ++i) {
            const double v = t.get(i + 1, m - 1) - p.d[i - 1] * t.get(i, m - 1) +
                             h_time_derivative(p, i, m - 1, t, x);
            t.set(i, m, v);
        }
        if (m == 1 && g_u_tau.has_value()) {
            t.set(p.n, 1, -p.d[p.n - 1] * x[p.n - 1] + p.eval_f(x) + *g_u_tau);
        }
    }
    return t;
}

double x1_derivative_chain(const CascadeParams& p, std::span<const double> x, int order,
                           std::optional<double> g_u_tau) {
    if (order < 0 || order > p.n)
        throw std::invalid_argument("x1_derivative_chain: order must lie in [0, n]");
    if (order < p.n) {
        StateDerivs t = build_state_derivs(p, x, order, std::nullopt);
        return t.get(1, order);
    }
    if (!g_u_tau.has_value())
        throw std::invalid_argument("x1_derivative_chain: order n requires the delayed input value");
    // x_1^{(n)} = f(x) + g(u_tau) + sum_i h_i^{(n-i)} with h_i = -d_i x_i + H_i
    StateDerivs t = build_state_derivs(p, x, p.n - 1, std::nullopt);
    double v = -p.d[p.n - 1] * x[p.n - 1] + p.eval_f(x) + *g_u_tau;
    for (int i = 1; i <= p.n - 1; ++i) {
        const int m = p.n - i;
        v += -p.d[i - 1] * t.get(i, m) + h_time_derivative(p, i, m, t, x);
    }
    return v;
}

std::vector<double> x1_derivatives(const CascadeParams& p, std::span<const double> x,
                                   int max_order, std::optional<double> g_u_tau) {
    std::vector<double> out(max_order + 1);
    const int table_order = std::min(max_order, p.n - 1);
    StateDerivs t = build_state_derivs(p, x, table_order, std::nullopt);
    for (int j = 0; j <= table_order; ++j) out[j] = t.get(1, j);
    if (max_order >= p.n) {
        if (max_order > p.n)
            throw std::invalid_argument("x1_derivatives: orders beyond n are not available");
        out[p.n] = x1_derivative_chain(p, x, p.n, g_u_tau);
    }
    return out;
}

CascadeParams trauma_sample_plant() {
    CascadeParams p;
    p.n = 3;
    p.d = {1.1311, 1.1362, 0.2727};
    return p;
}

}  // namespace poscade
