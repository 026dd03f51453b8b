// Timing harness comparing the OpenMP kernels against their serial
// reference paths: the energy-monitor sweep and the gain feasibility grid.

#include <chrono>
#include <cmath>
#include <cstdio>

#include "poscade/certify.hpp"
#include "poscade/scenario.hpp"
#include "poscade/sim.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

poscade::Trajectory synthetic_trajectory(long rows) {
    poscade::Trajectory traj;
    traj.n = 3;
    traj.dt = 0.01;
    traj.record_dt = 0.01;
    traj.t_end = rows * traj.record_dt;
    traj.rows.resize(rows);
    for (long j = 0; j < rows; ++j) {
        poscade::TrajectoryRow& r = traj.rows[j];
        const double t = j * traj.record_dt;
        r.t = t;
        r.x = {200.0 + std::sin(t), 160.0, 140.0};
        r.e = {std::sin(0.3 * t), std::cos(0.2 * t), std::sin(0.1 * t)};
        r.e_u = 0.1 * std::sin(t);
        r.e_a = 2.0 * std::sin(0.4 * t);
        r.tau = 1.5 + 0.5 * std::sin(0.05 * t);
        r.gate = std::sin(0.7 * t) > 0.0 ? 1 : 0;
    }
    return traj;
}

}  // namespace

int main() {
    const poscade::ControllerGains gains{0.15, 0.1, 5.0};
    const poscade::LkWeights w{0.1, 0.1, 10.0};

    {
        poscade::Trajectory serial = synthetic_trajectory(40000);
        poscade::Trajectory parallel = serial;

        auto t0 = Clock::now();
        poscade::lyapunov_eval_serial(serial, w, gains, 0.2, 3.0);
        const double ts = seconds_since(t0);

        t0 = Clock::now();
        poscade::lyapunov_eval(parallel, w, gains, 0.2, 3.0);
        const double tp = seconds_since(t0);

        double max_dev = 0.0;
        for (std::size_t j = 0; j < serial.rows.size(); ++j)
            max_dev = std::max(max_dev, std::abs(serial.rows[j].V - parallel.rows[j].V));
        std::printf("energy monitor   %6zu rows   serial %8.3f ms   omp %8.3f ms   x%.2f   "
                    "max dev %.3g\n",
                    serial.rows.size(), ts * 1e3, tp * 1e3, ts / tp, max_dev);
    }

    {
        poscade::SearchFixed fixed;
        fixed.tau_hat = 1e-5;
        poscade::SearchGrid grid;
        grid.points_per_axis = 17;
        const poscade::ControllerGains strong{100.0, 10.0, 0.1};

        auto t0 = Clock::now();
        const poscade::SearchOutcome s = poscade::feasibility_search_serial(strong, fixed, grid);
        const double ts = seconds_since(t0);

        t0 = Clock::now();
        const poscade::SearchOutcome p = poscade::feasibility_search(strong, fixed, grid);
        const double tp = seconds_since(t0);

        const double dev = (s.feasible && p.feasible) ? std::abs(s.best.delta - p.best.delta)
                                                      : -1.0;
        std::printf("feasibility grid %6ld cells  serial %8.3f ms   omp %8.3f ms   x%.2f   "
                    "delta dev %.3g\n",
                    static_cast<long>(std::pow(grid.points_per_axis, 5)), ts * 1e3, tp * 1e3,
                    ts / tp, dev);
    }
    return 0;
}
