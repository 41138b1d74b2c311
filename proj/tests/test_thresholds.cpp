#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nesskit/errors.hpp"
#include "nesskit/thresholds.hpp"
#include "support/test_models.hpp"

using namespace nesskit;
using testsupport::fixture_reservoir_1;
using testsupport::fixture_reservoir_2;
using testsupport::two_level;

namespace {
constexpr double kPi = std::numbers::pi;

ReservoirSpec zero_coupled(double beta) {
    return {beta, FormFactor::power_gaussian(0.5, 1.0, Eigen::MatrixXcd::Zero(2, 2))};
}
} // namespace

TEST_CASE("fgr_constant on the fixture") {
    const auto p = two_level();
    const auto gamma0 = fgr_constant(p, fixture_reservoir_1(), fixture_reservoir_2());
    REQUIRE(gamma0.has_value());
    // 1^2 * 4 pi e^{-2}
    CHECK(*gamma0 == doctest::Approx(4.0 * kPi * std::exp(-2.0)).epsilon(1e-12));

    // reservoir 2 coupling halved: moment scales by 1/4 and becomes the min
    const ReservoirSpec weak(0.5, FormFactor::power_gaussian(0.5, 0.5, testsupport::sigma_x()));
    const auto reduced = fgr_constant(p, fixture_reservoir_1(), weak);
    CHECK(*reduced == doctest::Approx(kPi * std::exp(-2.0)).epsilon(1e-12));

    CHECK(*fgr_constant(p, zero_coupled(1.0), zero_coupled(0.5)) == 0.0);

    const ParticleSystem single((Eigen::VectorXd(1) << 0.0).finished());
    Eigen::MatrixXcd one(1, 1);
    one << 1.0;
    const ReservoirSpec r1(1.0, FormFactor::power_gaussian(0.5, 1.0, one));
    CHECK_FALSE(fgr_constant(single, r1, r1).has_value());
}

TEST_CASE("fgr_constant is monotone in coupling magnitudes") {
    std::mt19937 rng(321);
    const auto p = testsupport::random_particle(rng, 4);
    for (int trial = 0; trial < 40; ++trial) {
        const auto r1 = testsupport::random_reservoir(rng, 4);
        const auto r2 = testsupport::random_reservoir(rng, 4);
        const double base = *fgr_constant(p, r1, r2);
        // scale every |B_nm| up by 1.3 on both reservoirs
        auto grow = [](const ReservoirSpec& r) {
            const auto& pg = r.form_factor.power_gaussian_form();
            return ReservoirSpec(r.beta,
                                 FormFactor::power_gaussian(pg.exponent, 1.3 * pg.scale,
                                                            pg.coupling));
        };
        CHECK(*fgr_constant(p, grow(r1), grow(r2)) >= base);
    }
}

TEST_CASE("condition_b_norm against an independent Simpson evaluation") {
    // alpha = 1/2, mu = 1, equal temperatures (delta beta = 0), c = 1, ||B|| = 1.
    const auto r = fixture_reservoir_1();
    const double norm = condition_b_norm(r, 1.0, 1.0);
    CHECK(norm > 0.0);

    auto piece_oracle = [&](double nu) {
        auto f = [&](double u) {
            return std::pow(u, 2.0 * 0.5 + 1.0 - 2.0 * nu) * (u + 1.0)
                 * std::exp(-2.0 * u * u);
        };
        return std::sqrt(8.0 * kPi * testsupport::simpson(f, 0.0, 18.6, 1 << 15));
    };
    CHECK(norm == doctest::Approx(piece_oracle(0.5) + piece_oracle(1.0)).epsilon(1e-6));

    // frozen high-precision value (mpmath, 30 digits)
    CHECK(norm == doctest::Approx(7.8908758475195813).epsilon(1e-9));
}

TEST_CASE("condition_b_norm homogeneity and edge cases") {
    CHECK(condition_b_norm(zero_coupled(1.0), 1.0, 1.0) == 0.0);

    const ReservoirSpec doubled(1.0, FormFactor::power_gaussian(0.5, 2.0, testsupport::sigma_x()));
    const double base = condition_b_norm(fixture_reservoir_1(), 1.0, 1.0);
    CHECK(condition_b_norm(doubled, 1.0, 1.0) == doctest::Approx(2.0 * base).epsilon(1e-12));

    // near the integrability boundary the endpoint singularity still converges
    CHECK(condition_b_norm(fixture_reservoir_1(), 1.0, 1.4) > 0.0);
    // mu >= alpha + 1 diverges at u -> 0
    CHECK_THROWS_AS(condition_b_norm(fixture_reservoir_1(), 1.0, 1.5), physics_error);
    CHECK_THROWS_AS(condition_b_norm(fixture_reservoir_1(), 1.0, 0.4), config_error);
    // angular-moment variant lacks radial data
    Eigen::MatrixXd s(2, 2);
    s << 0.0, 1.0, 1.0, 0.0;
    const ReservoirSpec table(1.0, FormFactor::angular_moments(s));
    CHECK_THROWS_AS(condition_b_norm(table, 1.0, 1.0), physics_error);
}

TEST_CASE("condition_b_norm homogeneity on random couplings") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const auto r = testsupport::random_reservoir(rng, 3);
        const auto& pg = r.form_factor.power_gaussian_form();
        const double mu = pg.exponent + 0.6; // inside the integrability window
        std::uniform_real_distribution<double> betad(0.2, 5.0);
        const double other = betad(rng);
        const double base = condition_b_norm(r, other, mu);
        const ReservoirSpec scaled(
            r.beta, FormFactor::power_gaussian(pg.exponent, 3.0 * pg.scale, pg.coupling));
        CHECK(condition_b_norm(scaled, other, mu)
              == doctest::Approx(3.0 * base).epsilon(1e-12));
    }
}

TEST_CASE("coupling_thresholds formulas") {
    const auto p = two_level();

    SUBCASE("alpha exponent arithmetic") {
        const auto thr = coupling_thresholds(p, fixture_reservoir_1(),
                                             ReservoirSpec(1.0, fixture_reservoir_1().form_factor),
                                             1.5, kPi / 4.0);
        CHECK(thr.alpha == doctest::Approx(0.5).epsilon(1e-15));
    }

    SUBCASE("explicit g0 and g1 at beta_1 = beta_2 = 1, sigma = 1, delta0 = pi/4") {
        const ReservoirSpec warm(1.0, fixture_reservoir_1().form_factor);
        const auto thr = coupling_thresholds(p, warm, warm, 1.5, kPi / 4.0);
        const double half_norm = condition_b_norm_piece(warm, 1.0, 0.5);
        CHECK(thr.g0 == doctest::Approx(std::sin(kPi / 4.0) / (3.0 * half_norm)).epsilon(1e-13));
        // mu = 3/2: alpha = 1/2, g1 = min(g0^2, 1^{1/(2+1/2)}) = min(g0^2, 1)
        CHECK(thr.g1 == doctest::Approx(std::min(thr.g0 * thr.g0, 1.0)).epsilon(1e-13));
    }

    SUBCASE("doubling both norms halves g0 and leaves alpha") {
        const ReservoirSpec warm(1.0, fixture_reservoir_1().form_factor);
        const ReservoirSpec strong(1.0,
                                   FormFactor::power_gaussian(0.5, 2.0, testsupport::sigma_x()));
        const auto base = coupling_thresholds(p, warm, warm, 1.5, kPi / 4.0);
        const auto loud = coupling_thresholds(p, strong, strong, 1.5, kPi / 4.0);
        CHECK(loud.g0 == doctest::Approx(base.g0 / 2.0).epsilon(1e-12));
        CHECK(loud.alpha == base.alpha);
    }

    SUBCASE("uncoupled model gives the +inf sentinel and the temperature cap") {
        const auto thr = coupling_thresholds(p, zero_coupled(1.0), zero_coupled(0.5), 1.5,
                                             kPi / 4.0);
        CHECK(thr.g0_infinite);
        CHECK(std::isinf(thr.g0));
        CHECK(thr.g1 == doctest::Approx(std::pow(1.0, 1.0 / 2.5)).epsilon(1e-13));
    }
}

TEST_CASE("g1 never exceeds the temperature cap") {
    std::mt19937 rng(222);
    for (int trial = 0; trial < 25; ++trial) {
        const auto p = testsupport::random_particle(rng, 3);
        const auto r1 = testsupport::random_reservoir(rng, 3);
        const auto r2 = testsupport::random_reservoir(rng, 3);
        const double mu = 1.2;
        const auto thr = coupling_thresholds(p, r1, r2, mu, kPi / 4.0);
        const double cap = std::pow(1.0 / std::max(r1.beta, r2.beta), 1.0 / (2.0 + thr.alpha));
        CHECK(thr.g1 <= cap * (1.0 + 1e-14));
    }
}

TEST_CASE("self-adjointness integral against the Gamma-function closed form") {
    // int (1 + 1/|k|) ||G||^2 d^3k = 4 pi (int_0^inf r^3 e^{-2r^2} dr
    //                              + int_0^inf r^2 e^{-2r^2} dr) for alpha = 1/2, c = 1:
    // = 4 pi (1/8 + (1/4) sqrt(pi/8)).
    const double expected = 4.0 * kPi * (0.125 + 0.25 * std::sqrt(kPi / 8.0));
    CHECK(self_adjointness_integral(fixture_reservoir_1())
          == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("remainder_scale") {
    CHECK(remainder_scale(0.0, 0.5, 1.5) == 0.0);
    CHECK(remainder_scale(1.0, 1.0, 0.77) == doctest::Approx(3.0).epsilon(1e-15));
    // |g| rho^mu + |g|^3 rho^{-1/2} + |g|^2 rho^{2 mu - 1} at (0.1, 0.01, 3/2)
    CHECK(remainder_scale(0.1, 0.01, 1.5) == doctest::Approx(0.010101).epsilon(1e-14));
    CHECK_THROWS_AS(remainder_scale(0.1, 0.0, 1.5), config_error);
}

TEST_CASE("remainder_scale matches its defining polynomial") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> gd(-0.5, 0.5), rd(1e-4, 2.0), md(0.6, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const double g = gd(rng), rho = rd(rng), mu = md(rng);
        const double direct = std::abs(g) * std::pow(rho, mu)
                            + std::pow(std::abs(g), 3) / std::sqrt(rho)
                            + g * g * std::pow(rho, 2.0 * mu - 1.0);
        CHECK(remainder_scale(g, rho, mu) == doctest::Approx(direct).epsilon(1e-15));
    }
}

TEST_CASE("cone_parameter") {
    const ReservoirSpec warm(1.0, fixture_reservoir_1().form_factor);
    CHECK(cone_parameter(0.0, kPi / 6.0, warm, warm) == 0.0);
    const double base = cone_parameter(0.1, kPi / 6.0, warm, warm);
    CHECK(cone_parameter(0.2, kPi / 6.0, warm, warm) == doctest::Approx(4.0 * base).epsilon(1e-13));
    // hand value with unit norms: a = g^2/sin (1+1+1)^2 (n1+n2)^2; here the
    // norms come from the quadrature, so check the structural identity instead
    const double n = condition_b_norm_piece(warm, 1.0, 0.5);
    CHECK(base == doctest::Approx(0.01 / std::sin(kPi / 6.0) * 9.0 * 4.0 * n * n).epsilon(1e-12));
}

TEST_CASE("check_conditions report") {
    const auto p = two_level();
    const ConditionReport rep = check_conditions(p, fixture_reservoir_1(), fixture_reservoir_2(),
                                                 0.1, 1.2, kPi / 4.0, kPi / 6.0);
    CHECK(rep.condition_d == ConditionFlag::Pass);
    CHECK(rep.condition_a == ConditionFlag::Pass);
    CHECK(rep.condition_b == ConditionFlag::Pass);
    CHECK(rep.fgr_gamma0 == doctest::Approx(4.0 * kPi * std::exp(-2.0)).epsilon(1e-12));
    CHECK(rep.alpha_exponent == doctest::Approx((1.2 - 0.5) / (1.2 + 0.5)).epsilon(1e-15));
    CHECK(rep.abs_delta_beta == doctest::Approx(0.5));
    CHECK(rep.min_beta == doctest::Approx(0.5));
    CHECK_FALSE(rep.bohr_degenerate);

    const ConditionReport uncoupled =
        check_conditions(p, zero_coupled(1.0), zero_coupled(0.5), 0.1, 1.2, kPi / 4.0, kPi / 6.0);
    CHECK(uncoupled.condition_d == ConditionFlag::Fail);
    CHECK(uncoupled.fgr_gamma0 == 0.0);
}
