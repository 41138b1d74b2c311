#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nesskit/errors.hpp"
#include "nesskit/quadrature.hpp"
#include "support/test_models.hpp"

using namespace nesskit;

TEST_CASE("adaptive quadrature reproduces closed forms") {
    CHECK(integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0)
          == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    // int_0^18.6 e^{-2u^2} du = sqrt(pi/8) to far beyond double precision
    CHECK(integrate_adaptive([](double u) { return std::exp(-2.0 * u * u); }, 0.0, 18.6)
          == doctest::Approx(std::sqrt(std::numbers::pi / 8.0)).epsilon(1e-13));
    // integrable endpoint singularity
    CHECK(integrate_adaptive([](double x) { return x > 0 ? 1.0 / std::sqrt(x) : 0.0; }, 0.0, 1.0,
                             1e-9)
          == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("adaptive quadrature agrees with fixed-grid Simpson") {
    auto f = [](double u) { return (u + 1.0) * std::exp(-2.0 * u * u) * std::cos(u); };
    const double adaptive = integrate_adaptive(f, 0.0, 10.0);
    const double fixed = testsupport::simpson(f, 0.0, 10.0, 1 << 14);
    CHECK(adaptive == doctest::Approx(fixed).epsilon(1e-10));
}

TEST_CASE("adaptive quadrature reports non-convergence") {
    // Non-integrable singularity cannot meet an absolute tolerance.
    CHECK_THROWS_AS(integrate_adaptive([](double x) { return x > 0 ? 1.0 / x : 0.0; },
                                       0.0, 1.0, 1e-10, 20),
                    numerical_error);
}

TEST_CASE("Gauss-Legendre rule integrates polynomials exactly") {
    const GaussLegendreRule rule = gauss_legendre(8);
    double wsum = 0.0, m2 = 0.0, m14 = 0.0;
    for (int i = 0; i < 8; ++i) {
        wsum += rule.weights[i];
        m2 += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
        m14 += rule.weights[i] * std::pow(rule.nodes[i], 14);
    }
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(m2 == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(m14 == doctest::Approx(2.0 / 15.0).epsilon(1e-13)); // degree 14 < 2n-1
}

TEST_CASE("sphere rule recovers the surface area") {
    const double area = testsupport::sphere_integrate([](const Eigen::Vector3d&) { return 1.0; });
    CHECK(area == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-12));
}
