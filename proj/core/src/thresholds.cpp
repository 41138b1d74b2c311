#include "nesskit/thresholds.hpp"

#include <cmath>
#include <numbers>

#include "nesskit/errors.hpp"
#include "nesskit/quadrature.hpp"

namespace nesskit {

namespace {

constexpr double kPi = std::numbers::pi;

// e^{-2 u^2} falls below 1e-300 past here; the remaining weights cannot revive it.
constexpr double kTailCut = 18.6;

} // namespace

std::optional<double> fgr_constant(const ParticleSystem& p,
                                   const ReservoirSpec& r1, const ReservoirSpec& r2) {
    if (p.dim() < 2) return std::nullopt;
    double best = std::numeric_limits<double>::infinity();
    for (const ReservoirSpec* r : {&r1, &r2}) {
        for (int m = 1; m < p.dim(); ++m) {
            for (int n = 0; n < m; ++n) {
                const double e = p.bohr_frequency(m, n);
                best = std::min(best, e * e * angular_moment(r->form_factor, p, m, n));
            }
        }
    }
    return best;
}

double condition_b_norm_piece(const ReservoirSpec& r, double other_beta, double nu,
                              double abs_tol) {
    const auto& pg = r.form_factor.power_gaussian_form();
    const double alpha = pg.exponent;
    if (2.0 * alpha + 1.0 - 2.0 * nu <= -1.0)
        throw physics_error("condition (B) norm diverges at u -> 0: nu = "
                            + std::to_string(nu) + " >= alpha + 1 = "
                            + std::to_string(alpha + 1.0));
    const double beta = std::max(r.beta, other_beta);
    const double dbeta = r.beta - beta; // <= 0, lightens the integrand
    const double bnorm = r.form_factor.coupling_operator_norm();

    const double power = 2.0 * alpha + 1.0 - 2.0 * nu;
    auto integrand = [&](double u) {
        if (u <= 0.0) return 0.0;
        return std::pow(u, power) * (u + 1.0) * std::exp(dbeta * u - 2.0 * u * u);
    };
    const double integral = integrate_adaptive(integrand, 0.0, kTailCut, abs_tol);
    return std::sqrt(8.0 * kPi * pg.scale * pg.scale * bnorm * bnorm * integral);
}

double condition_b_norm(const ReservoirSpec& r, double other_beta, double mu,
                        double abs_tol) {
    if (!(mu > 0.5))
        throw config_error("condition (B) norm requires mu > 1/2");
    return condition_b_norm_piece(r, other_beta, 0.5, abs_tol)
         + condition_b_norm_piece(r, other_beta, mu, abs_tol);
}

double self_adjointness_integral(const ReservoirSpec& r, double abs_tol) {
    const auto& pg = r.form_factor.power_gaussian_form();
    const double bnorm = r.form_factor.coupling_operator_norm();
    auto integrand = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double profile = std::pow(u, pg.exponent) * std::exp(-u * u);
        return (u * u + u) * profile * profile;
    };
    const double integral = integrate_adaptive(integrand, 0.0, kTailCut, abs_tol);
    return 4.0 * kPi * pg.scale * pg.scale * bnorm * bnorm * integral;
}

CouplingThresholds coupling_thresholds(const ParticleSystem& p,
                                       const ReservoirSpec& r1, const ReservoirSpec& r2,
                                       double mu, double delta0) {
    if (!(mu > 0.5))
        throw config_error("coupling thresholds require mu > 1/2");
    if (!(delta0 > 0.0) || !(delta0 < kPi / 2.0))
        throw config_error("delta0 must lie in (0, pi/2)");

    CouplingThresholds out;
    out.alpha = (mu - 0.5) / (mu + 0.5);

    const double sigma = p.min_level_spacing();
    const double norm1 = condition_b_norm_piece(r1, r2.beta, 0.5);
    const double norm2 = condition_b_norm_piece(r2, r1.beta, 0.5);
    const double max_norm = std::max(norm1, norm2);
    const double c0 = 1.0 + 1.0 / std::sqrt(r1.beta) + 1.0 / std::sqrt(r2.beta);

    out.g0_infinite = (max_norm == 0.0);
    out.g0 = out.g0_infinite ? std::numeric_limits<double>::infinity()
                             : std::sqrt(sigma) * std::sin(delta0) / (c0 * max_norm);

    const double temp_cap = std::pow(1.0 / std::max(r1.beta, r2.beta), 1.0 / (2.0 + out.alpha));
    out.g1 = out.g0_infinite ? temp_cap
                             : std::min(std::pow(out.g0, 1.0 / out.alpha), temp_cap);
    return out;
}

double remainder_scale(double g, double rho, double mu) {
    if (!(rho > 0.0))
        throw config_error("remainder_scale requires rho > 0");
    const double a = std::abs(g);
    return a * std::pow(rho, mu) + a * a * a / std::sqrt(rho)
         + a * a * std::pow(rho, 2.0 * mu - 1.0);
}

double cone_parameter(double g, double im_delta,
                      const ReservoirSpec& r1, const ReservoirSpec& r2) {
    if (!(im_delta > 0.0) || !(im_delta < kPi / 2.0))
        throw config_error("im_delta must lie in (0, pi/2)");
    const double sum = condition_b_norm_piece(r1, r2.beta, 0.5)
                     + condition_b_norm_piece(r2, r1.beta, 0.5);
    const double c0 = 1.0 + 1.0 / std::sqrt(r1.beta) + 1.0 / std::sqrt(r2.beta);
    return g * g / std::sin(im_delta) * c0 * c0 * sum * sum;
}

ConditionReport check_conditions(const ParticleSystem& p,
                                 const ReservoirSpec& r1, const ReservoirSpec& r2,
                                 double g, double mu, double delta0, double im_delta,
                                 double quad_tol, double bohr_tol) {
    ConditionReport rep{};
    rep.mu = mu;
    rep.alpha_exponent = (mu - 0.5) / (mu + 0.5);

    const auto gamma0 = fgr_constant(p, r1, r2);
    rep.fgr_applicable = gamma0.has_value();
    rep.fgr_gamma0 = gamma0.value_or(0.0);
    rep.condition_d = !rep.fgr_applicable ? ConditionFlag::NotEvaluable
                     : (rep.fgr_gamma0 > 0.0 ? ConditionFlag::Pass : ConditionFlag::Fail);

    // Condition (C): strict ordering is enforced at construction; the extra
    // simplicity of the nonzero L_p spectrum is reported as a warning.
    rep.bohr_degenerate = p.has_degenerate_bohr_frequencies(bohr_tol);
    rep.condition_c = ConditionFlag::Pass;

    const bool variant_a = r1.form_factor.is_power_gaussian()
                        && r2.form_factor.is_power_gaussian();
    if (variant_a) {
        rep.sa_integral = std::max(self_adjointness_integral(r1, quad_tol),
                                   self_adjointness_integral(r2, quad_tol));
        rep.condition_a = std::isfinite(rep.sa_integral) ? ConditionFlag::Pass
                                                         : ConditionFlag::Fail;
        try {
            rep.cond_b_norms = {condition_b_norm(r1, r2.beta, mu, quad_tol),
                                condition_b_norm(r2, r1.beta, mu, quad_tol)};
            rep.cond_b_evaluable = true;
            rep.condition_b = ConditionFlag::Pass;
        } catch (const physics_error&) {
            rep.cond_b_norms = {std::numeric_limits<double>::quiet_NaN(),
                                std::numeric_limits<double>::quiet_NaN()};
            rep.cond_b_evaluable = false;
            rep.condition_b = ConditionFlag::Fail;
        }
        if (p.dim() >= 2) {
            const CouplingThresholds thr = coupling_thresholds(p, r1, r2, mu, delta0);
            rep.g0 = thr.g0;
            rep.g0_infinite = thr.g0_infinite;
            rep.g1 = thr.g1;
        } else {
            rep.g0 = rep.g1 = std::numeric_limits<double>::quiet_NaN();
        }
        rep.cone_a = cone_parameter(g, im_delta, r1, r2);
    } else {
        rep.sa_integral = std::numeric_limits<double>::quiet_NaN();
        rep.cond_b_norms = {std::numeric_limits<double>::quiet_NaN(),
                            std::numeric_limits<double>::quiet_NaN()};
        rep.cond_b_evaluable = false;
        rep.condition_a = ConditionFlag::NotEvaluable;
        rep.condition_b = ConditionFlag::NotEvaluable;
        rep.g0 = rep.g1 = std::numeric_limits<double>::quiet_NaN();
        rep.cone_a = std::numeric_limits<double>::quiet_NaN();
    }

    rep.rho = std::pow(std::abs(g), 2.0 - 2.0 * rep.alpha_exponent);
    rep.epsilon_g_rho = (rep.rho > 0.0) ? remainder_scale(g, rep.rho, mu) : 0.0;
    rep.abs_delta_beta = std::abs(r1.beta - r2.beta);
    rep.min_beta = std::min(r1.beta, r2.beta);
    return rep;
}

} // namespace nesskit
