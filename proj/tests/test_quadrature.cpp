#include <cmath>
#include <numbers>

#include "doctest.h"
#include "leapfrog/errors.hpp"
#include "leapfrog/quadrature.hpp"

using namespace leapfrog;

TEST_CASE("exp-sinh integrates algebraic and log-weighted tails") {
    // \int_1^inf log v / v^2 dv = 1 and \int_1^inf log v / v^3 dv = 1/4
    const auto a = quadrature::half_line([](double v) { return std::log(v) / (v * v); }, 1.0, 1e-12);
    const auto b = quadrature::half_line([](double v) { return std::log(v) / (v * v * v); }, 1.0, 1e-12);
    CHECK(a.value == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(b.value == doctest::Approx(0.25).epsilon(1e-11));
}

TEST_CASE("exp-sinh on [0, inf) with rational integrand") {
    // \int_0^inf rho^3/(1+rho^2)^3 = 1/4
    const auto r = quadrature::half_line(
        [](double x) { return x * x * x / std::pow(1.0 + x * x, 3); }, 0.0, 1e-12);
    CHECK(r.value == doctest::Approx(0.25).epsilon(1e-11));
}

TEST_CASE("tanh-sinh handles endpoint singularities") {
    const auto r = quadrature::interval([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-12);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-10));
    const auto s = quadrature::interval([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-13);
    CHECK(s.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("non-convergence reports the last two iterates") {
    // Oscillating, non-decaying integrand never settles.
    try {
        quadrature::half_line([](double x) { return std::cos(x); }, 0.0, 1e-14);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(std::isfinite(e.last()));
        CHECK(std::isfinite(e.previous()));
    }
}
