#include "nesskit/ness.hpp"

#include <cmath>
#include <string>

#include "nesskit/errors.hpp"
#include "nesskit/levelshift.hpp"

namespace nesskit {

namespace {

// Kernel vector of a (near-singular) matrix: minimal-|lambda| eigenvector
// followed by one inverse-iteration refinement.
Eigen::VectorXcd kernel_vector(const Eigen::MatrixXcd& a) {
    const int n = static_cast<int>(a.rows());
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a);
    int idx = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double mag = std::abs(es.eigenvalues()(i));
        if (mag < best) {
            best = mag;
            idx = i;
        }
    }
    Eigen::VectorXcd v = es.eigenvectors().col(idx);
    const Complex lambda = es.eigenvalues()(idx);
    // One inverse-iteration sweep; the shift is offset by a sliver so the
    // factorization stays regular, and the update is kept only if it helps.
    const double sliver = 1e-13 * (1.0 + a.norm());
    Eigen::MatrixXcd shifted = a - (lambda + sliver) * Eigen::MatrixXcd::Identity(n, n);
    Eigen::VectorXcd refined = Eigen::FullPivLU<Eigen::MatrixXcd>(shifted).solve(v);
    if (refined.allFinite() && refined.norm() > 0.0) {
        refined /= refined.norm();
        if ((a * refined - lambda * refined).norm() <= (a * v - lambda * v).norm())
            v = refined;
    }
    return v;
}

// Rotate the vector so its largest entry is real positive, then require all
// entries positive to relative 1e-10.
Eigen::VectorXd positivity_fix(const Eigen::VectorXcd& v, const char* what) {
    int peak = 0;
    v.cwiseAbs().maxCoeff(&peak);
    const Complex phase = v(peak) / std::abs(v(peak));
    Eigen::VectorXcd rotated = v / phase;
    const double scale = rotated.cwiseAbs().maxCoeff();
    for (int i = 0; i < rotated.size(); ++i) {
        if (std::abs(rotated(i).imag()) > 1e-10 * scale || rotated(i).real() < -1e-10 * scale)
            throw physics_error(std::string("Perron-Frobenius violation: ") + what
                                + " kernel vector is not single-signed (FGR failure or "
                                  "numerical breakdown)");
    }
    return rotated.real().cwiseMax(0.0);
}

} // namespace

NessSolution solve_ness(const ParticleSystem& p,
                        const ReservoirSpec& r1, const ReservoirSpec& r2) {
    const int n = p.dim();
    const Eigen::MatrixXcd lambda0_flat = assemble_lambda_zero(p, r1, r2, 0.0);
    const SpectralCertificate cert = spectral_certificate(lambda0_flat);
    if (!cert.simple_kernel) {
        std::string evs;
        for (const Complex& z : cert.near_zero)
            evs += " (" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")";
        throw physics_error("degenerate kernel: spectral certificate found "
                            + std::to_string(cert.zero_count)
                            + " near-zero eigenvalues:" + evs);
    }

    NessSolution sol;
    Eigen::VectorXd gamma = positivity_fix(kernel_vector(lambda0_flat.adjoint()), "adjoint");
    gamma *= std::sqrt(static_cast<double>(n)) / gamma.sum();
    sol.gamma = gamma;
    sol.populations = gamma / std::sqrt(static_cast<double>(n));

    sol.zeta = p.gibbs_vector(p.beta_p());

    const double z = p.partition_function(p.beta_p());
    Eigen::VectorXd zstar(n);
    for (int j = 0; j < n; ++j)
        zstar(j) = std::sqrt(z / n) * std::exp(p.beta_p() * p.energy(j) / 2.0) * gamma(j);
    sol.zeta_star = zstar;

    const Eigen::MatrixXcd lambda0 = assemble_lambda_zero(p, r1, r2, p.beta_p());
    sol.residual_zeta = (lambda0 * sol.zeta.cast<Complex>()).norm();
    sol.residual_zeta_star = (lambda0.adjoint() * sol.zeta_star.cast<Complex>()).norm();
    const double bound = 1e-10 * std::max(1.0, lambda0.norm())
                       * std::max(1.0, sol.zeta_star.norm());
    if (sol.residual_zeta > bound || sol.residual_zeta_star > bound)
        throw numerical_error("NESS kernel residual above tolerance: "
                              + std::to_string(sol.residual_zeta) + ", "
                              + std::to_string(sol.residual_zeta_star));
    return sol;
}

TwoLevelWeights two_level_closed_form(double E, double beta1, double beta2,
                                      double g1E, double g2E) {
    if (!(E > 0.0))
        throw config_error("two_level_closed_form requires E > 0");
    if (!(g1E >= 0.0) || !(g2E >= 0.0) || g1E + g2E <= 0.0)
        throw config_error("two_level_closed_form requires g1E + g2E > 0");
    const double rho1 = 1.0 / std::expm1(beta1 * E);
    const double rho2 = 1.0 / std::expm1(beta2 * E);
    TwoLevelWeights w;
    w.alpha = 1.0 + (g1E + g2E) / (g1E * rho1 + g2E * rho2);
    const double root2 = std::sqrt(2.0);
    w.gamma_ground = root2 * w.alpha / (w.alpha + 1.0);
    w.gamma_excited = root2 / (w.alpha + 1.0);
    return w;
}

Eigen::VectorXd convert_beta_p(const NessSolution& sol, double target_beta_p,
                               const ParticleSystem& p,
                               const ReservoirSpec& r1, const ReservoirSpec& r2) {
    const int n = p.dim();
    double z = 0.0;
    for (int k = 0; k < n; ++k) z += std::exp(-target_beta_p * p.energy(k));
    Eigen::VectorXd out(n);
    for (int j = 0; j < n; ++j)
        out(j) = std::sqrt(z / n) * std::exp(target_beta_p * p.energy(j) / 2.0) * sol.gamma(j);

    const Eigen::MatrixXcd lambda0 = assemble_lambda_zero(p, r1, r2, target_beta_p);
    const double residual = (lambda0.adjoint() * out.cast<Complex>()).norm();
    if (residual > 1e-9 * std::max(1.0, lambda0.norm()) * std::max(1.0, out.norm()))
        throw numerical_error("converted kernel vector fails the adjoint-kernel check: "
                              "residual " + std::to_string(residual));
    return out;
}

} // namespace nesskit
