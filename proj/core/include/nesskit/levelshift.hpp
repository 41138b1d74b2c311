#pragma once

#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nesskit/model.hpp"

namespace nesskit {

// Per-reservoir golden-rule kernel: eta(m, n) >= 0 with zero diagonal,
// eta_{mn} = 2 pi E_{mn}^2 e^{beta |E_{mn}|/2} (e^{beta |E_{mn}|} - 1)^{-1} S_{mn}.
struct RateKernel {
    Eigen::MatrixXd eta;
    double beta;
};

RateKernel rate_kernel(const ParticleSystem& p, const ReservoirSpec& r);

// Single-reservoir level-shift matrix Gamma_{j0}: off-diagonal -eta_{mn},
// diagonal sum_{k != m} e^{beta E_{mk}/2} eta_{mk}. Annihilates the Gibbs
// vector at the reservoir temperature.
Eigen::MatrixXd gamma_single_reservoir(const ParticleSystem& p, const ReservoirSpec& r);

// Real part of the two-reservoir zero-sector operator:
// (Gamma_0)_{mn} = sum_j e^{(beta_j - beta_p) E_{mn}/2} (Gamma_{j0})_{mn}.
Eigen::MatrixXd gamma_zero(const ParticleSystem& p,
                           const ReservoirSpec& r1, const ReservoirSpec& r2,
                           double beta_p);

// Lambda_0(beta_p) = i Gamma_0 on the diagonal zero sector span{phi_n x phi_n}.
Eigen::MatrixXcd assemble_lambda_zero(const ParticleSystem& p,
                                      const ReservoirSpec& r1, const ReservoirSpec& r2,
                                      double beta_p);

// Im Lambda_e for the simple nonzero Bohr frequency e = E_m - E_n: half the
// total golden-rule escape width of the two levels. The real (Lamb-shift)
// part is not computed. Refuses degenerate Bohr frequencies.
double lambda_width_nonzero(const ParticleSystem& p,
                            const ReservoirSpec& r1, const ReservoirSpec& r2,
                            int m, int n);

struct SpectralCertificate {
    Eigen::VectorXcd eigenvalues;          // sorted by imaginary part
    int zero_count;                        // eigenvalues within zero_tol of 0
    double zero_tol;                       // 1e-10 (1 + ||Lambda_0||)
    double gap;                            // min Im over nonzero eigenvalues (inf for none)
    bool upper_half;                       // all Im >= -1e-10
    bool simple_kernel;                    // zero_count == 1
    std::vector<Complex> near_zero;        // the offending eigenvalues when not simple
};

SpectralCertificate spectral_certificate(const Eigen::MatrixXcd& lambda0,
                                         double zero_tol_scale = 1e-10,
                                         double half_plane_tol = 1e-10);

struct ResonanceGroup {
    double e;                              // eigenvalue of L_p
    std::vector<Complex> resonances;       // e + g^2 sigma(Lambda_e)
    bool refused;                          // degenerate nonzero Bohr frequency
};

struct ResonanceForecast {
    std::vector<ResonanceGroup> groups;
    double gap_bound;                      // min(g^2 delta0_num, tau'/2); constant c taken 1
    bool coupling_above_threshold;         // g >= g1 when a threshold was supplied
};

// Second-order resonance positions for every eigenvalue of L_p. The zero-sector
// eigenvalue at the origin is pinned exactly at 0. g1_threshold may be NaN
// (unknown); when supplied and g >= g1 the forecast is flagged, not refused.
ResonanceForecast resonance_forecast(const ParticleSystem& p,
                                     const ReservoirSpec& r1, const ReservoirSpec& r2,
                                     double g, double beta_p, double tau_prime,
                                     double g1_threshold = std::numeric_limits<double>::quiet_NaN());

// Bundle the full level-shift data for reporting.
struct LevelShiftSet {
    Eigen::MatrixXd gamma_10;
    Eigen::MatrixXd gamma_20;
    Eigen::MatrixXcd lambda_zero;
    double beta_p;
    struct NonzeroEntry {
        int upper, lower;   // e = E_upper - E_lower > 0
        double e;
        std::optional<double> width;   // absent when refused (degenerate e)
    };
    std::vector<NonzeroEntry> nonzero;  // one entry per level pair, e > 0
    SpectralCertificate certificate;
};

LevelShiftSet build_level_shift_set(const ParticleSystem& p,
                                    const ReservoirSpec& r1, const ReservoirSpec& r2,
                                    double beta_p, double zero_tol_scale = 1e-10);

} // namespace nesskit
