#include <stdexcept>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "poscade/errcascade.hpp"
#include "poscade/model.hpp"
#include "poscade/signals.hpp"

using namespace poscade;

namespace {

// independent oracle: expand the recursive definitions e_2 = e_1' + e_1,
// e_k = e_{k-1}' + e_{k-1} + e_{k-2} symbolically over the derivatives of e_1
std::vector<std::vector<std::int64_t>> expand_recursion(int n) {
    std::vector<std::vector<std::int64_t>> e(n + 1);
    e[1] = {1};
    for (int k = 2; k <= n; ++k) {
        std::vector<std::int64_t> v(k, 0);
        for (std::size_t j = 0; j < e[k - 1].size(); ++j) {
            v[j + 1] += e[k - 1][j];  // derivative shift
            v[j] += e[k - 1][j];
        }
        if (k >= 3)
            for (std::size_t j = 0; j < e[k - 2].size(); ++j) v[j] += e[k - 2][j];
        e[k] = v;
    }
    return e;
}

}  // namespace

TEST_CASE("coefficient tables for small orders") {
    const CascadeCoefficients c2 = CascadeCoefficients::compute(2);
    CHECK(c2.at(2, 0) == 1);
    CHECK(c2.at(2, 1) == 1);

    const CascadeCoefficients c3 = CascadeCoefficients::compute(3);
    CHECK(c3.at(3, 0) == 2);
    CHECK(c3.at(3, 1) == 2);
    CHECK(c3.at(3, 2) == 1);

    const CascadeCoefficients c4 = CascadeCoefficients::compute(4);
    CHECK(c4.at(4, 0) == 3);
    CHECK(c4.at(4, 1) == 5);
    CHECK(c4.at(4, 2) == 3);
    CHECK(c4.at(4, 3) == 1);
}

TEST_CASE("closed-form coefficients equal the symbolic expansion up to n = 6") {
    for (int n = 1; n <= 6; ++n) {
        const CascadeCoefficients c = CascadeCoefficients::compute(n);
        const auto oracle = expand_recursion(n);
        for (int i = 1; i <= n; ++i)
            for (int j = 0; j <= i - 1; ++j) CHECK(c.at(i, j) == oracle[i][j]);
    }
}

TEST_CASE("first column follows the integer Fibonacci recurrence") {
    const CascadeCoefficients c = CascadeCoefficients::compute(20);
    std::vector<std::int64_t> fib{0, 1, 1};
    for (int i = 3; i <= 20; ++i) fib.push_back(fib[i - 1] + fib[i - 2]);
    for (int i = 2; i <= 20; ++i) CHECK(c.at(i, 0) == fib[i]);
    CHECK(c.at(1, 0) == 1);
}

TEST_CASE("tracking errors on the trauma-sample start state") {
    const CascadeParams p = trauma_sample_plant();
    const CascadeCoefficients c = CascadeCoefficients::compute(3);
    const std::vector<double> x{500.0, 50.0, 5.0};
    const std::vector<double> x1d = x1_derivatives(p, x, 2);
    // reference value and slope are both zero at t = 0
    const std::vector<double> e1d{0.0 - x1d[0], 0.0 - x1d[1], 9.0 - x1d[2]};
    const std::vector<double> e = tracking_errors(c, e1d);
    CHECK(e[0] == doctest::Approx(-500.0));
    CHECK(e1d[1] == doctest::Approx(515.55).epsilon(1e-12));
    CHECK(e[1] == doctest::Approx(15.55).epsilon(1e-10));
}

TEST_CASE("perfect tracking nulls the whole cascade") {
    const CascadeCoefficients c = CascadeCoefficients::compute(3);
    const std::vector<double> zeros{0.0, 0.0, 0.0};
    for (double v : tracking_errors(c, zeros)) CHECK(v == 0.0);
}

TEST_CASE("only the value error contributes when derivatives vanish") {
    const CascadeCoefficients c = CascadeCoefficients::compute(3);
    const std::vector<double> e1d{1.0, 0.0, 0.0};
    CHECK(tracking_errors(c, e1d)[2] == doctest::Approx(2.0));
}

TEST_CASE("delay-compensation error") {
    InputHistory flat;
    flat.append(0.0, 7.0);
    flat.append(10.0, 7.0);
    CHECK(compute_e_u(flat, 8.0, 2.0) == doctest::Approx(0.0));

    InputHistory step;
    step.append(0.0, 0.0);
    step.append(5.0, 0.0);
    step.append(5.01, 10.0);
    step.append(10.0, 10.0);
    CHECK(compute_e_u(step, 6.0, 2.0) == doctest::Approx(-10.0));

    InputHistory ramp;
    for (int i = 0; i <= 100; ++i) ramp.append(0.1 * i, 0.1 * i);
    CHECK(compute_e_u(ramp, 7.0, 2.0) == doctest::Approx(-2.0).epsilon(1e-12));

    CHECK_THROWS_AS(compute_e_u(ramp, 7.0, 0.0), std::invalid_argument);
}

TEST_CASE("composite error") {
    CHECK(compute_e_a(0.0, 0.0, 0.0, 0.1, 5.0) == 0.0);
    CHECK(compute_e_a(1.0, 2.0, 3.0, 0.1, 5.0) == doctest::Approx(16.2).epsilon(1e-12));
    const double e_n = 4.0, lambda = 0.1;
    CHECK(compute_e_a(-lambda * e_n, e_n, 0.0, lambda, 5.0) == doctest::Approx(0.0));
}

TEST_CASE("stacked error vector") {
    ErrorFrame f;
    f.e = {1.0, 2.0, 3.0};
    f.e_u = 4.0;
    f.e_a = 5.0;
    const std::vector<double> z = f.z();
    CHECK(z == std::vector<double>{1.0, 2.0, 3.0, 4.0, 5.0});
    CHECK(f.z_norm() == doctest::Approx(std::sqrt(55.0)));
}

TEST_CASE("error_rate needs one extra derivative order") {
    const CascadeCoefficients c = CascadeCoefficients::compute(3);
    const std::vector<double> shallow{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(error_rate(c, 3, shallow), std::invalid_argument);
    const std::vector<double> full{1.0, 2.0, 3.0, 4.0};
    // e_3' = 2 e_1' + 2 e_1'' + e_1'''
    CHECK(error_rate(c, 3, full) == doctest::Approx(2.0 * 2.0 + 2.0 * 3.0 + 4.0));
}
