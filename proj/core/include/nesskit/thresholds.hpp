#pragma once

#include <array>
#include <optional>

#include "nesskit/model.hpp"

namespace nesskit {

// Fermi-Golden-Rule constant gamma_0: the minimum over reservoirs and level
// pairs of E_{mn}^2 S_{mn}. Empty for N = 1 (not applicable).
std::optional<double> fgr_constant(const ParticleSystem& p,
                                   const ReservoirSpec& r1, const ReservoirSpec& r2);

// Single nu-exponent piece of the coupling norm at theta = 0:
// [ 2 int_0^inf ds int u (u+1) u^{-2 nu} e^{dbeta u} ||G(u sigma)||^2 du ]^{1/2},
// dbeta = r.beta - max(r.beta, other_beta) <= 0. Power-gaussian variant only.
double condition_b_norm_piece(const ReservoirSpec& r, double other_beta, double nu,
                              double abs_tol = 1e-10);

// ||G||_{dbeta, mu, theta=0} = piece(1/2) + piece(mu), mu > 1/2. Throws on the
// u -> 0 divergence mu >= alpha + 1.
double condition_b_norm(const ReservoirSpec& r, double other_beta, double mu,
                        double abs_tol = 1e-10);

// int (1 + |k|^{-1}) ||G(k)||^2 d^3k per unit g^2 (power-gaussian variant only).
double self_adjointness_integral(const ReservoirSpec& r, double abs_tol = 1e-10);

struct CouplingThresholds {
    double g0;          // +inf sentinel for uncoupled models
    double g1;
    double alpha;       // (mu - 1/2) / (mu + 1/2)
    bool g0_infinite;
};

// g0 and g1 with every free constant fixed to 1; order-of-magnitude
// diagnostics, not guarantees.
CouplingThresholds coupling_thresholds(const ParticleSystem& p,
                                       const ReservoirSpec& r1, const ReservoirSpec& r2,
                                       double mu, double delta0);

// epsilon(g, rho) = |g| rho^mu + |g|^3 rho^{-1/2} + |g|^2 rho^{2 mu - 1}.
double remainder_scale(double g, double rho, double mu);

// Cone opening diagnostic a = g^2 / sin(im_delta) C0^2 (sum_j ||G_j||_{.,1/2,0})^2
// with C0 = 1 + beta_1^{-1/2} + beta_2^{-1/2} and the free constant taken 1.
double cone_parameter(double g, double im_delta,
                      const ReservoirSpec& r1, const ReservoirSpec& r2);

enum class ConditionFlag { Pass, Fail, NotEvaluable };

struct ConditionReport {
    double fgr_gamma0;                 // 0 when not applicable
    bool fgr_applicable;
    double sa_integral;                // largest per-reservoir value; NaN if not evaluable
    std::array<double, 2> cond_b_norms;
    bool cond_b_evaluable;
    double g0;
    bool g0_infinite;
    double g1;
    double alpha_exponent;
    double mu;
    double cone_a;
    double epsilon_g_rho;
    double rho;                        // scale used for epsilon, |g|^{2 - 2 alpha}
    double abs_delta_beta;             // |beta_1 - beta_2| (Condition E, reported only)
    double min_beta;
    bool bohr_degenerate;              // warning: nonzero Bohr frequencies collide
    ConditionFlag condition_a;
    ConditionFlag condition_b;
    ConditionFlag condition_c;
    ConditionFlag condition_d;
};

// Evaluates every condition diagnostic for the model. All thresholds carry the
// "up to an unspecified multiplicative constant" caveat.
ConditionReport check_conditions(const ParticleSystem& p,
                                 const ReservoirSpec& r1, const ReservoirSpec& r2,
                                 double g, double mu, double delta0, double im_delta,
                                 double quad_tol = 1e-10,
                                 double bohr_tol = 1e-10);

} // namespace nesskit
