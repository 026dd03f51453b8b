#include "poscade/signals.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace poscade {

void InputHistory::append(double t, double u) {
    if (!t_.empty() && !(t > t_.back())) {
        std::ostringstream os;
        os << "history timestamps must be strictly increasing: " << t << " after " << t_.back();
        throw std::invalid_argument(os.str());
    }
    if (!(u >= 0.0)) throw std::invalid_argument("history values must be non-negative");
    t_.push_back(t);
    u_.push_back(u);
}

double InputHistory::sample(double t, Side side) const {
    if (t_.empty()) return 0.0;
    if (t < t_.front()) return 0.0;
    if (t == t_.front()) return side == Side::Left ? 0.0 : u_.front();
    if (t >= t_.back()) return u_.back();
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
    const double w = (t - t_[i]) / (t_[i + 1] - t_[i]);
    return u_[i] + w * (u_[i + 1] - u_[i]);
}

void InputHistory::truncate_before(double t_keep) {
    if (t_.size() < 2) return;
    const auto it = std::lower_bound(t_.begin(), t_.end(), t_keep);
    if (it == t_.begin()) return;
    const std::size_t drop = static_cast<std::size_t>(it - t_.begin()) - 1;
    if (drop == 0) return;
    t_.erase(t_.begin(), t_.begin() + drop);
    u_.erase(u_.begin(), u_.begin() + drop);
}

double InputHistory::last_time() const {
    if (t_.empty()) throw std::out_of_range("history is empty");
    return t_.back();
}

double InputHistory::last_value() const {
    if (u_.empty()) throw std::out_of_range("history is empty");
    return u_.back();
}

namespace {

// p'(s), coefficients indexed by power of s
std::vector<double> poly_diff(const std::vector<double>& p) {
    if (p.size() <= 1) return {0.0};
    std::vector<double> q(p.size() - 1, 0.0);
    for (std::size_t i = 1; i < p.size(); ++i) q[i - 1] = p[i] * static_cast<double>(i);
    return q;
}

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

double poly_eval(const std::vector<double>& p, double s) {
    double v = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) v = v * s + p[i];
    return v;
}

}  // namespace

ReferenceTrajectory ReferenceTrajectory::tanh_squared(double amplitude, double rate,
                                                      int max_order) {
    if (max_order < 0) throw std::invalid_argument("reference.max_order must be >= 0");
    ReferenceTrajectory r;
    r.kind_ = Kind::TanhSquared;
    r.amplitude_ = amplitude;
    r.rate_ = rate;
    r.max_order_ = max_order;
    // d/dt of a polynomial in s = tanh(rate t) is p'(s) * rate * (1 - s^2)
    const std::vector<double> chain{rate, 0.0, -rate};
    r.poly_.push_back({0.0, 0.0, amplitude});
    for (int j = 1; j <= max_order; ++j)
        r.poly_.push_back(poly_mul(poly_diff(r.poly_.back()), chain));
    return r;
}

ReferenceTrajectory ReferenceTrajectory::sinusoid(double amplitude, double rate, double offset,
                                                  int max_order) {
    ReferenceTrajectory r;
    r.kind_ = Kind::Sinusoid;
    r.amplitude_ = amplitude;
    r.rate_ = rate;
    r.offset_ = offset;
    r.max_order_ = max_order;
    return r;
}

ReferenceTrajectory ReferenceTrajectory::custom(std::function<double(double, int)> fn,
                                                int max_order) {
    ReferenceTrajectory r;
    r.kind_ = Kind::Custom;
    r.max_order_ = max_order;
    r.custom_ = std::move(fn);
    return r;
}

double ReferenceTrajectory::eval(double t, int order) const {
    if (order < 0 || order > max_order_)
        throw std::out_of_range("reference derivative order out of range");
    switch (kind_) {
        case Kind::TanhSquared:
            return poly_eval(poly_[order], std::tanh(rate_ * t));
        case Kind::Sinusoid: {
            const double base = amplitude_ * std::pow(rate_, order) *
                                std::sin(rate_ * t + order * std::acos(-1.0) / 2.0);
            return order == 0 ? base + offset_ : base;
        }
        case Kind::Custom:
            return custom_(t, order);
    }
    return 0.0;
}

}  // namespace poscade
