#pragma once

#include <Eigen/Dense>

#include "nesskit/model.hpp"

namespace nesskit {

// Stationary-state data for the two-reservoir system.
struct NessSolution {
    Eigen::VectorXd zeta;        // kernel of Lambda_0(beta_p) = Gibbs vector at beta_p
    Eigen::VectorXd zeta_star;   // adjoint kernel at beta_p, <zeta_star, zeta> = 1
    Eigen::VectorXd gamma;       // adjoint kernel components at beta_p = 0, sum = sqrt(N)
    Eigen::VectorXd populations; // gamma / sqrt(N)
    double residual_zeta;        // ||Lambda_0 zeta||
    double residual_zeta_star;   // ||Lambda_0^* zeta_star||
};

// Solves for the NESS weights. Throws physics_error on a degenerate kernel or
// when the kernel vector is not single-signed (Perron-Frobenius violation).
NessSolution solve_ness(const ParticleSystem& p,
                        const ReservoirSpec& r1, const ReservoirSpec& r2);

struct TwoLevelWeights {
    double gamma_ground;   // weight of the lower level pair
    double gamma_excited;  // weight of the upper level pair
    double alpha;          // alpha(E) = 1 + (g1 + g2) / (g1 rho_1 + g2 rho_2)
};

// Closed form for N = 2 at beta_p = 0. E > 0 is the level splitting; g1E, g2E
// are the per-reservoir spectral weights at E (any common positive scale).
TwoLevelWeights two_level_closed_form(double E, double beta1, double beta2,
                                      double g1E, double g2E);

// Converts the beta_p = 0 adjoint kernel to particle temperature target_beta_p:
// sqrt(tr e^{-beta_p H_p} / N) e^{beta_p E_j / 2} gamma_j, and verifies the
// result annihilates Lambda_0(beta_p)^* to relative 1e-9.
Eigen::VectorXd convert_beta_p(const NessSolution& sol, double target_beta_p,
                               const ParticleSystem& p,
                               const ReservoirSpec& r1, const ReservoirSpec& r2);

} // namespace nesskit
