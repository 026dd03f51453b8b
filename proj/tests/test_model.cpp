#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "poscade/model.hpp"

using namespace poscade;

namespace {

const SaturationParams kSat{50.0, 0.0224, 75.0};
const DelayLaw kLag{4.48, 0.322, 1e-3, 4.0};

}  // namespace

TEST_CASE("saturation midpoint, ceiling and zero-input value") {
    CHECK(eval_saturation(kSat, 75.0) == doctest::Approx(25.0).epsilon(1e-15));
    CHECK(eval_saturation(kSat, 1e6) > 49.999);
    CHECK(eval_saturation(kSat, 1e6) <= 50.0);
    // 50 / (1 + e^{1.68}), evaluated independently at high precision
    CHECK(eval_saturation(kSat, 0.0) == doctest::Approx(7.854773444272637).epsilon(1e-12));
}

TEST_CASE("logistic and tanh forms are the same function") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 500.0);
    for (int i = 0; i < 200; ++i) {
        const double x = u(rng);
        const double tanh_form =
            kSat.beta / 2.0 + kSat.beta / 2.0 * std::tanh(kSat.k_s / 2.0 * (x - kSat.eta));
        CHECK(eval_saturation(kSat, x) == doctest::Approx(tanh_form).epsilon(1e-12));
    }
}

TEST_CASE("saturation output stays in (0, beta) and is monotone") {
    std::mt19937_64 rng(11);
    // past u ~ 800 the gap to beta falls below double resolution
    std::uniform_real_distribution<double> u(0.0, 800.0);
    std::vector<double> xs(300);
    for (double& x : xs) x = u(rng);
    std::sort(xs.begin(), xs.end());
    double prev = eval_saturation(kSat, xs.front());
    CHECK(prev > 0.0);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double v = eval_saturation(kSat, xs[i]);
        CHECK(v > 0.0);
        CHECK(v < kSat.beta);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("saturation parameter constraints") {
    SaturationParams p = kSat;
    p.eta = 40.0;  // below beta
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = kSat;
    p.k_s = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("power-law lag values") {
    CHECK(eval_delay(kLag, 1.0) == doctest::Approx(4.48).epsilon(1e-15));
    CHECK(eval_delay(kLag, 5.0) == doctest::Approx(2.6681465054223676).epsilon(1e-12));
    DelayLaw small = kLag;
    small.gamma = 0.0448;
    CHECK(eval_delay(small, 5.0) == doctest::Approx(0.026681465054223676).epsilon(1e-12));
}

TEST_CASE("lag is undefined at the origin and decreasing in the state") {
    CHECK_THROWS_AS(eval_delay(kLag, 0.0), std::domain_error);
    CHECK_THROWS_AS(eval_delay(kLag, -1.0), std::domain_error);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(kLag.phi1, 1000.0);
    for (int i = 0; i < 200; ++i) {
        const double a = u(rng);
        const double b = a * 1.3;
        CHECK(eval_delay(kLag, a) > eval_delay(kLag, b));
        // the floor value is the supremum over the admissible range
        CHECK(eval_delay(kLag, a) < kLag.tau_max());
    }
    CHECK(kLag.tau_max() == doctest::Approx(eval_delay(kLag, kLag.phi1)));
}

TEST_CASE("slew bound consistency check") {
    // d_n k_d gamma phi1^{-k_d} = 3.6376... for the trauma-sample numbers
    CHECK(kLag.phi2_lower_bound(0.2727) == doctest::Approx(3.6376341941905714).epsilon(1e-12));
    CHECK_NOTHROW(kLag.validate_slew(0.2727));
    DelayLaw bad = kLag;
    bad.phi2 = 3.0;
    CHECK_THROWS_AS(bad.validate_slew(0.2727), std::invalid_argument);
}

TEST_CASE("system matrix is Metzler for the bidiagonal cascade") {
    CHECK(metzler_check(trauma_sample_plant()).is_metzler);

    CascadeParams z;
    z.n = 2;
    z.d = {0.0, 0.0};
    CHECK(metzler_check(z).is_metzler);

    CascadeParams four;
    four.n = 4;
    four.d = {1.0, 2.0, 3.0, 4.0};
    const MetzlerReport rep = metzler_check(four);
    CHECK(rep.is_metzler);
    CHECK(rep.a[0][0] == -1.0);
    CHECK(rep.a[2][3] == 1.0);
    CHECK(rep.a[3][3] == -4.0);
    CHECK(rep.text.find("-4") != std::string::npos);
}

TEST_CASE("plant right-hand side") {
    const CascadeParams p = trauma_sample_plant();
    const std::vector<double> x{500.0, 50.0, 5.0};
    const std::vector<double> dx = rhs(p, x, 0.0);
    CHECK(dx[0] == doctest::Approx(-515.55).epsilon(1e-12));
    CHECK(dx[1] == doctest::Approx(-51.81).epsilon(1e-12));
    CHECK(dx[2] == doctest::Approx(-1.3635).epsilon(1e-12));

    const std::vector<double> zero{0.0, 0.0, 0.0};
    for (double v : rhs(p, zero, 0.0)) CHECK(v == 0.0);

    const std::vector<double> unit{0.0, 0.0, 1.0};
    const std::vector<double> forced = rhs(p, unit, 10.0);
    CHECK(forced[0] == 0.0);
    CHECK(forced[1] == 1.0);
    CHECK(forced[2] == doctest::Approx(-0.2727 + 10.0).epsilon(1e-12));

    CHECK_THROWS_AS(rhs(p, std::vector<double>{1.0, 2.0}, 0.0), std::invalid_argument);
}

TEST_CASE("flow points into the positive orthant on its boundary") {
    CascadeParams p = trauma_sample_plant();
    p.h_maps.resize(2);
    p.h_maps[0].value = [](std::span<const double> x) { return 0.3 * x[2]; };
    p.h_maps[0].max_derivative_order = 0;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 300.0);
    for (int trial = 0; trial < 400; ++trial) {
        std::vector<double> x{u(rng), u(rng), u(rng)};
        const int zeroed = trial % 3;
        x[zeroed] = 0.0;
        const double forcing = trial % 2 ? u(rng) : 0.0;
        CHECK(rhs(p, x, forcing)[zeroed] >= 0.0);
    }
}

TEST_CASE("x1 derivative chain on the trauma-sample numbers") {
    const CascadeParams p = trauma_sample_plant();
    const std::vector<double> x{500.0, 50.0, 5.0};
    CHECK(x1_derivative_chain(p, x, 1) == doctest::Approx(-515.55).epsilon(1e-12));
    CHECK(x1_derivative_chain(p, x, 2) == doctest::Approx(531.3286049999999).epsilon(1e-12));

    const std::vector<double> zero{0.0, 0.0, 0.0};
    for (int j = 1; j <= 3; ++j)
        CHECK(x1_derivative_chain(p, zero, j, 0.0) == 0.0);

    CHECK_THROWS_AS(x1_derivative_chain(p, x, 4), std::invalid_argument);
    CHECK_THROWS_AS(x1_derivative_chain(p, x, 3), std::invalid_argument);  // order n needs input
    CHECK(x1_derivative_chain(p, x, 3, 10.0) ==
          doctest::Approx((-0.2727 * 5.0 + 10.0 - 1.1362 * -51.81) -
                          1.1311 * 531.3286049999999)
              .epsilon(1e-10));
}

TEST_CASE("coupling maps enter the chain through their derivative oracles") {
    // H_1(x) = 0.5 x_2 with exact time derivatives taken from the table
    CascadeParams p = trauma_sample_plant();
    p.h_maps.resize(2);
    p.h_maps[0].value = [](std::span<const double> x) { return 0.5 * x[1]; };
    p.h_maps[0].time_derivative = [](const StateDerivs& t, int j) { return 0.5 * t.get(2, j); };
    p.h_maps[0].max_derivative_order = 2;

    const std::vector<double> x{500.0, 50.0, 5.0};
    const double x1d = x1_derivative_chain(p, x, 1);
    CHECK(x1d == doctest::Approx(50.0 - 1.1311 * 500.0 + 25.0).epsilon(1e-12));
    const double x2d = 5.0 - 1.1362 * 50.0;
    CHECK(x1_derivative_chain(p, x, 2) ==
          doctest::Approx(x2d - 1.1311 * x1d + 0.5 * x2d).epsilon(1e-12));

    p.h_maps[0].max_derivative_order = 0;  // oracle no longer deep enough
    CHECK_THROWS_AS(x1_derivative_chain(p, x, 2), std::invalid_argument);
}
