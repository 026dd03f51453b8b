#include "poscade/errcascade.hpp"

#include <cmath>
#include <stdexcept>

namespace poscade {

CascadeCoefficients CascadeCoefficients::compute(int n) {
    if (n < 1) throw std::invalid_argument("cascade order must be >= 1");
    CascadeCoefficients c;
    c.n = n;
    c.a.resize(n);
    for (int i = 1; i <= n; ++i) c.a[i - 1].assign(i, 0);

    const double sqrt5 = std::sqrt(5.0);
    const double phi = (1.0 + sqrt5) / 2.0;
    const double psi = (1.0 - sqrt5) / 2.0;
    auto binet = [&](int i) {
        return static_cast<std::int64_t>(
            std::llround((std::pow(phi, i) - std::pow(psi, i)) / sqrt5));
    };

    for (int i = 1; i <= n; ++i) c.a[i - 1][i - 1] = 1;  // unit superdiagonal
    for (int i = 2; i <= n; ++i) c.a[i - 1][0] = binet(i);
    for (int i = 3; i <= n; ++i) {
        for (int j = 1; j <= i - 2; ++j) {
            std::int64_t s = 0;
            for (int p = 1; p <= i - 1; ++p) {
                const int q = i - p - j + 1;
                if (q < 1) continue;  // out-of-range first-column entries are zero
                s += c.at(q, 0) * c.at(p + j - 1, j - 1);
            }
            c.a[i - 1][j] = s;
        }
    }
    return c;
}

std::int64_t CascadeCoefficients::at(int i, int j) const {
    if (i < 1 || i > n || j < 0 || j > i - 1)
        throw std::out_of_range("cascade coefficient index out of range");
    return a[i - 1][j];
}

std::vector<double> tracking_errors(const CascadeCoefficients& c,
                                    std::span<const double> e1_derivs) {
    if (static_cast<int>(e1_derivs.size()) < c.n)
        throw std::invalid_argument("tracking_errors: derivative orders 0..n-1 required");
    std::vector<double> e(c.n, 0.0);
    for (int i = 1; i <= c.n; ++i)
        for (int j = 0; j <= i - 1; ++j)
            e[i - 1] += static_cast<double>(c.at(i, j)) * e1_derivs[j];
    return e;
}

double error_rate(const CascadeCoefficients& c, int i, std::span<const double> e1_derivs) {
    if (i < 1 || i > c.n) throw std::invalid_argument("error_rate: index out of range");
    if (static_cast<int>(e1_derivs.size()) < i + 1)
        throw std::invalid_argument("error_rate: derivative orders 0..i required");
    double v = 0.0;
    for (int j = 0; j <= i - 1; ++j)
        v += static_cast<double>(c.at(i, j)) * e1_derivs[j + 1];
    return v;
}

double compute_e_u(const InputHistory& h, double t, double tau_hat) {
    if (!(tau_hat > 0.0)) throw std::invalid_argument("compute_e_u requires tau_hat > 0");
    return h.sample(t - tau_hat) - h.sample(t);
}

double compute_e_a(double e_n_rate, double e_n, double e_u, double lambda, double alpha) {
    return e_n_rate + lambda * e_n + alpha * e_u;
}

std::vector<double> ErrorFrame::z() const {
    std::vector<double> v = e;
    v.push_back(e_u);
    v.push_back(e_a);
    return v;
}

double ErrorFrame::z_norm() const {
    double s = e_u * e_u + e_a * e_a;
    for (double v : e) s += v * v;
    return std::sqrt(s);
}

}  // namespace poscade
