#pragma once

#include <functional>
#include <vector>

namespace poscade {

/// One-sided limit selector for history lookups. The interpolant is
/// continuous everywhere except at the history start, where the
/// pre-simulation value is identically zero; the side only matters there.
enum class Side { Left, Right };

/// Which Runge-Kutta stage is asking for a delayed value. The terminal
/// stage of a step sits on the right endpoint and must see left limits so
/// that a forcing jump aligned with the grid stays one-sided.
enum class StageSide { Interior, RightEndpoint };

/// Timestamped record of the applied control, with linear interpolation
/// at delayed lookup times. Values before the start of the record are 0.
class InputHistory {
public:
    explicit InputHistory(double t_start = 0.0) : t_start_(t_start) {}

    /// Appends a sample; timestamps must be strictly increasing and u >= 0.
    void append(double t, double u);

    /// Interpolated lookup. Pre-history times give 0, queries past the
    /// newest sample hold the last value.
    double sample(double t) const { return sample(t, Side::Right); }
    double sample(double t, Side side) const;
    double sample_at_stage(double t, StageSide stage) const {
        return sample(t, stage == StageSide::RightEndpoint ? Side::Left : Side::Right);
    }

    /// Drops samples no longer reachable by delayed lookups, keeping one
    /// bracketing sample at or before `t_keep`.
    void truncate_before(double t_keep);

    std::size_t size() const { return t_.size(); }
    bool empty() const { return t_.empty(); }
    double t_start() const { return t_start_; }
    double last_time() const;
    double last_value() const;

private:
    std::vector<double> t_;
    std::vector<double> u_;
    double t_start_ = 0.0;
};

/// Analytic reference trajectory with closed-form derivatives.
class ReferenceTrajectory {
public:
    enum class Kind { TanhSquared, Sinusoid, Custom };

    /// amplitude * tanh(rate * t)^2; derivatives generated to any order via
    /// a polynomial recurrence in s = tanh(rate t).
    static ReferenceTrajectory tanh_squared(double amplitude, double rate, int max_order = 6);
    /// amplitude * sin(rate * t) + offset.
    static ReferenceTrajectory sinusoid(double amplitude, double rate, double offset,
                                        int max_order = 8);
    static ReferenceTrajectory custom(std::function<double(double, int)> fn, int max_order);

    /// j-th time derivative at t; j = 0 is the value itself.
    double eval(double t, int order) const;

    Kind kind() const { return kind_; }
    int max_order() const { return max_order_; }
    double amplitude() const { return amplitude_; }
    double rate() const { return rate_; }
    double offset() const { return offset_; }

private:
    ReferenceTrajectory() = default;

    Kind kind_ = Kind::TanhSquared;
    double amplitude_ = 0.0;
    double rate_ = 0.0;
    double offset_ = 0.0;
    int max_order_ = 0;
    std::vector<std::vector<double>> poly_;  // tanh-squared: derivative j as polynomial in s
    std::function<double(double, int)> custom_;
};

}  // namespace poscade
