#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "poscade/signals.hpp"

namespace poscade {

/// Integer coefficient table a_{i,j} of the auxiliary error cascade
/// e_i = sum_j a_{i,j} e_1^{(j)}. The first column follows the Fibonacci
/// numbers (Binet form), the superdiagonal is 1, the interior obeys
/// a_{i,j} = sum_p a_{i-p-j+1,0} a_{p+j-1,j-1} with a_{q,0} taken as 0
/// for q < 1.
struct CascadeCoefficients {
    int n = 0;
    std::vector<std::vector<std::int64_t>> a;  // a[i-1][j], 0 <= j <= i-1

    static CascadeCoefficients compute(int n);
    std::int64_t at(int i, int j) const;  // 1-based row
};

/// e_1 .. e_n from the derivative stack e1_derivs[j] = x_r^{(j)} - x_1^{(j)};
/// needs orders 0 .. n-1.
std::vector<double> tracking_errors(const CascadeCoefficients& c,
                                    std::span<const double> e1_derivs);

/// Time derivative of e_i, i.e. sum_j a_{i,j} e_1^{(j+1)}; needs orders up to i.
double error_rate(const CascadeCoefficients& c, int i, std::span<const double> e1_derivs);

/// Delay-compensation error e_u(t) = u(t - tau_hat) - u(t), the telescoped
/// form of the integral of -u_dot over the estimate window.
double compute_e_u(const InputHistory& h, double t, double tau_hat);

/// Composite error e_a = e_n_rate + lambda e_n + alpha e_u.
double compute_e_a(double e_n_rate, double e_n, double e_u, double lambda, double alpha);

/// Error signals of one time instant and their stacked vector.
struct ErrorFrame {
    double t = 0.0;
    std::vector<double> e;  // e_1 .. e_n
    double e_u = 0.0;
    double e_a = 0.0;
    double e_n_rate = 0.0;

    std::vector<double> z() const;  // [e_1, ..., e_n, e_u, e_a]
    double z_norm() const;
};

}  // namespace poscade
