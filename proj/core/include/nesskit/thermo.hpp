#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nesskit/model.hpp"

namespace nesskit {

// g_{ji}(E_{ji})^2 = E_{ji}^2 S_{ji} for j > i (the momentum delta integral
// reduced to the sphere of radius E_{ji}).
double spectral_coupling(const ParticleSystem& p, const ReservoirSpec& r, int j, int i);

// Leading-order heat flux per g^2 into reservoir `which` (1 or 2):
// (2 pi / sqrt(N)) sum_{j>i} (gamma_j e^{beta_r E_{ji}} - gamma_i)
//                  E_{ji} g_{ji}^2 / (e^{beta_r E_{ji}} - 1),
// with gamma from solve_ness (beta_p = 0 convention, sum = sqrt(N)).
double eta_prime(const ParticleSystem& p,
                 const ReservoirSpec& r1, const ReservoirSpec& r2,
                 int which, const Eigen::VectorXd& gamma);

// Leading-order entropy production (beta_1 - beta_2) g^2 eta'_1.
double entropy_production(double eta_prime_1, double g, double beta1, double beta2);

struct LinearResponse {
    double matrix_route;   // authoritative: first-order kernel correction
    double closed_form;    // printed prefactor form, as-is
    double ratio;          // closed_form / matrix_route (normalization audit)
};

// d eta'_1 / d(delta beta) at delta beta = 0 with beta_1 = r1.beta held fixed.
// Requires identical form factors on the two reservoirs.
LinearResponse linear_response(const ParticleSystem& p,
                               const ReservoirSpec& r1, const ReservoirSpec& r2);

struct ThermoReport {
    double eta_prime_1;
    double eta_prime_2;
    double flux_sum;
    double ep_leading;
    double g;
    std::optional<double> linear_coefficient; // present for identical couplings
};

ThermoReport thermo_report(const ParticleSystem& p,
                           const ReservoirSpec& r1, const ReservoirSpec& r2,
                           double g);

struct SweepRow {
    double delta_beta;
    Eigen::VectorXd gamma;
    double eta_prime_1;
    double eta_prime_2;
    double ep_leading;
};

struct SweepResult {
    std::vector<SweepRow> rows;            // in grid order
    std::vector<double> skipped;           // grid points with beta_2 <= 0
};

// Evaluates (gamma, eta'_1, eta'_2, EP) over a delta-beta grid with
// beta_2 = beta_1 - delta_beta. Rows are independent and evaluated on up to
// max_threads threads; output order follows the grid.
SweepResult sweep(const ParticleSystem& p,
                  const ReservoirSpec& r1, const ReservoirSpec& r2,
                  const std::vector<double>& delta_beta_grid,
                  double g, int max_threads = 0);

} // namespace nesskit
