#include "nesskit/levelshift.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nesskit/dynamics.hpp"
#include "nesskit/errors.hpp"

namespace nesskit {

namespace {
constexpr double kPi = std::numbers::pi;
}

RateKernel rate_kernel(const ParticleSystem& p, const ReservoirSpec& r) {
    const int n = p.dim();
    RateKernel out;
    out.beta = r.beta;
    out.eta = Eigen::MatrixXd::Zero(n, n);
    for (int m = 0; m < n; ++m) {
        for (int k = 0; k < n; ++k) {
            if (k == m) continue;
            const double e = std::abs(p.bohr_frequency(m, k));
            const double s = angular_moment(r.form_factor, p, m, k);
            out.eta(m, k) = 2.0 * kPi * e * e * std::exp(r.beta * e / 2.0)
                          / std::expm1(r.beta * e) * s;
        }
    }
    return out;
}

Eigen::MatrixXd gamma_single_reservoir(const ParticleSystem& p, const ReservoirSpec& r) {
    const RateKernel kernel = rate_kernel(p, r);
    const int n = p.dim();
    Eigen::MatrixXd g = -kernel.eta;
    for (int m = 0; m < n; ++m) {
        g(m, m) = 0.0;
        double diag = 0.0;
        for (int k = 0; k < n; ++k) {
            if (k == m) continue;
            diag += std::exp(r.beta * p.bohr_frequency(m, k) / 2.0) * kernel.eta(m, k);
        }
        g(m, m) = diag;
    }
    return g;
}

Eigen::MatrixXd gamma_zero(const ParticleSystem& p,
                           const ReservoirSpec& r1, const ReservoirSpec& r2,
                           double beta_p) {
    const int n = p.dim();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (const ReservoirSpec* r : {&r1, &r2}) {
        const Eigen::MatrixXd gj = gamma_single_reservoir(p, *r);
        for (int m = 0; m < n; ++m)
            for (int k = 0; k < n; ++k)
                out(m, k) += std::exp((r->beta - beta_p) * p.bohr_frequency(m, k) / 2.0) * gj(m, k);
    }
    return out;
}

Eigen::MatrixXcd assemble_lambda_zero(const ParticleSystem& p,
                                      const ReservoirSpec& r1, const ReservoirSpec& r2,
                                      double beta_p) {
    return Complex(0.0, 1.0) * gamma_zero(p, r1, r2, beta_p).cast<Complex>();
}

double lambda_width_nonzero(const ParticleSystem& p,
                            const ReservoirSpec& r1, const ReservoirSpec& r2,
                            int m, int n) {
    if (m == n)
        throw config_error("lambda_width_nonzero requires a nonzero Bohr frequency");
    const double e = p.bohr_frequency(m, n);
    // e must be simple as an eigenvalue of L_p.
    for (int a = 0; a < p.dim(); ++a)
        for (int b = 0; b < p.dim(); ++b) {
            if (a == b || (a == m && b == n)) continue;
            if (std::abs(p.bohr_frequency(a, b) - e) <= 1e-10)
                throw physics_error("Bohr frequency " + std::to_string(e)
                                    + " is degenerate; Lambda_e is not a scalar");
        }
    const RateMatrix rm = build_generator(p, r1, r2);
    auto escape = [&](int level) {
        double s = 0.0;
        for (int k = 0; k < p.dim(); ++k)
            if (k != level) s += rm.w[0](k, level) + rm.w[1](k, level);
        return s;
    };
    return 0.5 * (escape(m) + escape(n));
}

SpectralCertificate spectral_certificate(const Eigen::MatrixXcd& lambda0,
                                         double zero_tol_scale,
                                         double half_plane_tol) {
    if (lambda0.rows() != lambda0.cols())
        throw config_error("spectral_certificate expects a square matrix");
    SpectralCertificate cert;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(lambda0);
    Eigen::VectorXcd ev = es.eigenvalues();
    std::sort(ev.data(), ev.data() + ev.size(), [](Complex a, Complex b) {
        if (a.imag() != b.imag()) return a.imag() < b.imag();
        return a.real() < b.real();
    });
    cert.eigenvalues = ev;
    cert.zero_tol = zero_tol_scale * (1.0 + lambda0.norm());
    cert.zero_count = 0;
    cert.gap = std::numeric_limits<double>::infinity();
    cert.upper_half = true;
    for (int i = 0; i < ev.size(); ++i) {
        if (std::abs(ev(i)) <= cert.zero_tol) {
            ++cert.zero_count;
            cert.near_zero.push_back(ev(i));
            continue;
        }
        cert.gap = std::min(cert.gap, ev(i).imag());
        if (ev(i).imag() < -half_plane_tol) cert.upper_half = false;
    }
    cert.simple_kernel = (cert.zero_count == 1);
    if (!cert.simple_kernel && cert.zero_count > 1) {
        // keep near_zero as the offending list; nothing else to do
    }
    return cert;
}

ResonanceForecast resonance_forecast(const ParticleSystem& p,
                                     const ReservoirSpec& r1, const ReservoirSpec& r2,
                                     double g, double beta_p, double tau_prime,
                                     double g1_threshold) {
    ResonanceForecast out;
    out.coupling_above_threshold =
        std::isfinite(g1_threshold) && std::abs(g) >= g1_threshold;

    const Eigen::MatrixXcd lambda0 = assemble_lambda_zero(p, r1, r2, beta_p);
    const SpectralCertificate cert = spectral_certificate(lambda0);

    ResonanceGroup zero;
    zero.e = 0.0;
    zero.refused = false;
    bool pinned = false;
    for (int i = 0; i < cert.eigenvalues.size(); ++i) {
        const Complex ev = cert.eigenvalues(i);
        if (!pinned && std::abs(ev) <= cert.zero_tol) {
            zero.resonances.push_back(Complex(0.0, 0.0));
            pinned = true;
        } else {
            zero.resonances.push_back(g * g * ev);
        }
    }
    out.groups.push_back(std::move(zero));

    for (int m = 0; m < p.dim(); ++m) {
        for (int n = 0; n < p.dim(); ++n) {
            if (m == n) continue;
            ResonanceGroup grp;
            grp.e = p.bohr_frequency(m, n);
            try {
                const double width = lambda_width_nonzero(p, r1, r2, m, n);
                grp.resonances.push_back(Complex(grp.e, g * g * width));
                grp.refused = false;
            } catch (const physics_error&) {
                grp.refused = true;
            }
            out.groups.push_back(std::move(grp));
        }
    }

    const double delta0 = cert.gap;
    out.gap_bound = std::min(g * g * delta0, tau_prime / 2.0);
    return out;
}

LevelShiftSet build_level_shift_set(const ParticleSystem& p,
                                    const ReservoirSpec& r1, const ReservoirSpec& r2,
                                    double beta_p, double zero_tol_scale) {
    LevelShiftSet set;
    set.gamma_10 = gamma_single_reservoir(p, r1);
    set.gamma_20 = gamma_single_reservoir(p, r2);
    set.lambda_zero = assemble_lambda_zero(p, r1, r2, beta_p);
    set.beta_p = beta_p;
    set.certificate = spectral_certificate(set.lambda_zero, zero_tol_scale);
    for (int m = 0; m < p.dim(); ++m) {
        for (int n = 0; n < m; ++n) {
            LevelShiftSet::NonzeroEntry entry;
            entry.upper = m;
            entry.lower = n;
            entry.e = p.bohr_frequency(m, n);
            try {
                entry.width = lambda_width_nonzero(p, r1, r2, m, n);
            } catch (const physics_error&) {
                entry.width = std::nullopt;
            }
            set.nonzero.push_back(entry);
        }
    }
    return set;
}

} // namespace nesskit
