#include <doctest.h>

#include <cmath>
#include <random>

#include "nesskit/dynamics.hpp"
#include "nesskit/errors.hpp"
#include "nesskit/levelshift.hpp"
#include "nesskit/ness.hpp"
#include "support/test_models.hpp"

using namespace nesskit;
using testsupport::fixture_reservoir_1;
using testsupport::fixture_reservoir_2;
using testsupport::two_level;

TEST_CASE("equal temperatures give the Gibbs weights") {
    // beta_1 = beta_2 = 1, E = (0, 1): gamma = sqrt(2) (1, e^{-1}) / (1 + e^{-1}).
    const auto p = two_level();
    const ReservoirSpec warm(1.0, fixture_reservoir_1().form_factor);
    const NessSolution sol = solve_ness(p, warm, warm);
    const double z = 1.0 + std::exp(-1.0);
    CHECK(sol.gamma(0) == doctest::Approx(std::sqrt(2.0) / z).epsilon(1e-13));
    CHECK(sol.gamma(1) == doctest::Approx(std::sqrt(2.0) * std::exp(-1.0) / z).epsilon(1e-13));
    // frozen high-precision values
    CHECK(sol.gamma(0) == doctest::Approx(1.0338729567877506).epsilon(1e-13));
    CHECK(sol.gamma(1) == doctest::Approx(0.38034060558534443).epsilon(1e-13));
}

TEST_CASE("two-level fixture weights") {
    const auto p = two_level();
    const NessSolution sol = solve_ness(p, fixture_reservoir_1(), fixture_reservoir_2());
    // alpha(E) = 1 + 2/(rho_1 + rho_2) = 1.9418542557674382 (30-digit evaluation)
    CHECK(sol.gamma(0) == doctest::Approx(0.93349173205109265).epsilon(1e-10));
    CHECK(sol.gamma(1) == doctest::Approx(0.48072183032200240).epsilon(1e-10));
    CHECK(sol.gamma.sum() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
    CHECK(sol.populations.sum() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(sol.populations.minCoeff() > 0.0);
}

TEST_CASE("solution invariants on random models") {
    std::mt19937 rng(1200);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 7);
        std::uniform_real_distribution<double> betapd(0.0, 3.0);
        const auto p = testsupport::random_particle(rng, n, betapd(rng));
        const auto r1 = testsupport::random_reservoir(rng, n);
        const auto r2 = testsupport::random_reservoir(rng, n);
        const NessSolution sol = solve_ness(p, r1, r2);
        CHECK(sol.zeta_star.dot(sol.zeta) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(sol.gamma.sum() == doctest::Approx(std::sqrt(double(n))).epsilon(1e-10));
        CHECK(sol.populations.minCoeff() > 0.0);
    }
}

TEST_CASE("oracle equivalence with the Pauli stationary distribution") {
    std::mt19937 rng(1300);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 7);
        const auto p = testsupport::random_particle(rng, n);
        const auto r1 = testsupport::random_reservoir(rng, n);
        const auto r2 = testsupport::random_reservoir(rng, n);
        const NessSolution sol = solve_ness(p, r1, r2);
        const Eigen::VectorXd pstar = stationary_distribution(build_generator(p, r1, r2));
        CHECK((sol.populations - pstar).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("Gibbs limit across random equal-temperature models") {
    std::mt19937 rng(1400);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 7);
        const auto p = testsupport::random_particle(rng, n);
        std::uniform_real_distribution<double> betad(0.2, 5.0);
        const double beta = betad(rng);
        const ReservoirSpec r1(beta, testsupport::random_reservoir(rng, n).form_factor);
        const ReservoirSpec r2(beta, testsupport::random_reservoir(rng, n).form_factor);
        const NessSolution sol = solve_ness(p, r1, r2);
        const double z = p.partition_function(beta);
        for (int j = 0; j < n; ++j)
            CHECK(sol.populations(j)
                  == doctest::Approx(std::exp(-beta * p.energy(j)) / z).epsilon(1e-12));
    }
}

TEST_CASE("infinite-temperature limit gamma -> 1/sqrt(N)") {
    const ParticleSystem p((Eigen::VectorXd(3) << 0.0, 0.6, 1.4).finished());
    std::mt19937 rng(31);
    const Eigen::MatrixXcd b = testsupport::random_coupling(rng, 3);
    const FormFactor ff = FormFactor::power_gaussian(0.5, 1.0, b);
    const ReservoirSpec r1(1.0, ff);

    double prev_slope = 0.0;
    int k = 0;
    for (double beta2 : {1e-2, 1e-3, 1e-4}) {
        const NessSolution sol = solve_ness(p, r1, ReservoirSpec(beta2, ff));
        const double dev =
            (sol.gamma - Eigen::VectorXd::Constant(3, 1.0 / std::sqrt(3.0))).cwiseAbs().maxCoeff();
        const double slope = dev / beta2; // fitted C in ||gamma - 1/sqrt(N)|| <= C beta_2
        if (k > 0) CHECK(slope == doctest::Approx(prev_slope).epsilon(0.2));
        prev_slope = slope;
        ++k;
    }
}

TEST_CASE("two_level_closed_form") {
    SUBCASE("equal temperatures reduce to alpha = e^{beta E}") {
        const TwoLevelWeights w = two_level_closed_form(1.0, 1.0, 1.0, 1.0, 1.0);
        CHECK(w.alpha == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    }
    SUBCASE("worked fixture") {
        const TwoLevelWeights w = two_level_closed_form(1.0, 1.0, 0.5, 1.0, 1.0);
        CHECK(w.alpha == doctest::Approx(1.9418542557674382).epsilon(1e-14));
        CHECK(w.gamma_ground == doctest::Approx(0.93349173205109265).epsilon(1e-14));
        CHECK(w.gamma_excited == doctest::Approx(0.48072183032200240).epsilon(1e-14));
    }
    SUBCASE("decoupled reservoir gives single-reservoir Gibbs") {
        const TwoLevelWeights w = two_level_closed_form(1.0, 0.8, 2.0, 1.0, 0.0);
        CHECK(w.alpha == doctest::Approx(std::exp(0.8)).epsilon(1e-14));
    }
    SUBCASE("input validation") {
        CHECK_THROWS_AS(two_level_closed_form(-1.0, 1.0, 1.0, 1.0, 1.0), config_error);
        CHECK_THROWS_AS(two_level_closed_form(1.0, 1.0, 1.0, 0.0, 0.0), config_error);
    }
}

TEST_CASE("solve_ness agrees with the closed form on a grid") {
    for (double beta1 : {0.2, 1.0, 5.0}) {
        for (double beta2 : {0.2, 1.0, 5.0}) {
            for (double e1 : {0.5, 1.0, 2.0}) {
                const ParticleSystem p((Eigen::VectorXd(2) << 0.0, e1).finished());
                const FormFactor ff = fixture_reservoir_1().form_factor;
                const NessSolution sol =
                    solve_ness(p, ReservoirSpec(beta1, ff), ReservoirSpec(beta2, ff));
                const double s = angular_moment(ff, p, 1, 0);
                const TwoLevelWeights w =
                    two_level_closed_form(e1, beta1, beta2, e1 * e1 * s, e1 * e1 * s);
                CHECK(sol.gamma(0) == doctest::Approx(w.gamma_ground).epsilon(1e-10));
                CHECK(sol.gamma(1) == doctest::Approx(w.gamma_excited).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("convert_beta_p") {
    const auto p = two_level();
    const auto r1 = fixture_reservoir_1();
    const auto r2 = fixture_reservoir_2();
    const NessSolution sol = solve_ness(p, r1, r2);

    SUBCASE("target 0 is the identity") {
        const Eigen::VectorXd same = convert_beta_p(sol, 0.0, p, r1, r2);
        CHECK((same - sol.gamma).cwiseAbs().maxCoeff() <= 1e-14);
    }

    SUBCASE("equal-temperature model becomes self-adjoint: zeta* = zeta") {
        const ReservoirSpec warm(1.0, r1.form_factor);
        const ParticleSystem pth((Eigen::VectorXd(2) << 0.0, 1.0).finished(), 1.0);
        const NessSolution eq = solve_ness(pth, warm, warm);
        CHECK((eq.zeta_star - eq.zeta).cwiseAbs().maxCoeff() <= 1e-12);
    }

    SUBCASE("direct kernel solve of Lambda_0(1)^* agrees") {
        const Eigen::VectorXd converted = convert_beta_p(sol, 1.0, p, r1, r2);
        // independent kernel solve at beta_p = 1
        const Eigen::MatrixXcd l = assemble_lambda_zero(p, r1, r2, 1.0);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(l.adjoint());
        int idx = 0;
        double best = 1e300;
        for (int i = 0; i < 2; ++i)
            if (std::abs(es.eigenvalues()(i)) < best) {
                best = std::abs(es.eigenvalues()(i));
                idx = i;
            }
        Eigen::VectorXcd v = es.eigenvectors().col(idx);
        v /= v(0);
        CHECK(converted(1) / converted(0)
              == doctest::Approx(v(1).real()).epsilon(1e-9));
    }
}

TEST_CASE("degenerate kernel is refused with the certificate") {
    // Uncoupled pair of levels: transition graph is disconnected.
    const ParticleSystem p((Eigen::VectorXd(2) << 0.0, 1.0).finished());
    Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(2, 2);
    diag(0, 0) = 1.0;
    diag(1, 1) = -0.5;
    const FormFactor ff = FormFactor::power_gaussian(0.5, 1.0, diag);
    CHECK_THROWS_AS(solve_ness(p, ReservoirSpec(1.0, ff), ReservoirSpec(0.5, ff)),
                    physics_error);
}

TEST_CASE("monotone interpolation is observed, not asserted") {
    // For beta_2 between 0 and beta_1 populations tend to lie between Gibbs
    // and uniform; log any counterexample without failing the suite.
    const auto p = two_level();
    const FormFactor ff = fixture_reservoir_1().form_factor;
    const double beta1 = 1.0;
    const Eigen::VectorXd gibbs =
        Eigen::VectorXd(p.gibbs_vector(beta1).array().square().matrix());
    int violations = 0;
    for (double beta2 : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const NessSolution sol =
            solve_ness(p, ReservoirSpec(beta1, ff), ReservoirSpec(beta2, ff));
        for (int j = 0; j < 2; ++j) {
            const double lo = std::min(gibbs(j), 0.5);
            const double hi = std::max(gibbs(j), 0.5);
            if (sol.populations(j) < lo - 1e-12 || sol.populations(j) > hi + 1e-12)
                ++violations;
        }
    }
    if (violations > 0)
        MESSAGE("monotone interpolation violated at ", violations, " grid points");
}
