#include "nesskit/thermo.hpp"

#include <cmath>
#include <numbers>
#include <thread>

#include "nesskit/errors.hpp"
#include "nesskit/levelshift.hpp"
#include "nesskit/ness.hpp"

namespace nesskit {

namespace {

constexpr double kPi = std::numbers::pi;

bool identical_couplings(const FormFactor& a, const FormFactor& b) {
    if (a.is_power_gaussian() != b.is_power_gaussian()) return false;
    if (a.is_power_gaussian()) {
        const auto& fa = a.power_gaussian_form();
        const auto& fb = b.power_gaussian_form();
        if (fa.coupling.rows() != fb.coupling.rows()) return false;
        const double scale = 1.0 + fa.coupling.cwiseAbs().maxCoeff();
        return std::abs(fa.exponent - fb.exponent) <= 1e-12
            && std::abs(fa.scale - fb.scale) <= 1e-12 * (1.0 + fa.scale)
            && (fa.coupling - fb.coupling).cwiseAbs().maxCoeff() <= 1e-12 * scale;
    }
    const auto& ma = a.angular_moment_table().moments;
    const auto& mb = b.angular_moment_table().moments;
    if (ma.rows() != mb.rows()) return false;
    return (ma - mb).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + ma.cwiseAbs().maxCoeff());
}

// sum_{j>i} (v_j e^{beta E_{ji}} - v_i) E_{ji} g_{ji}^2 / (e^{beta E_{ji}} - 1)
// for the given reservoir's beta and form factor.
double flux_functional(const ParticleSystem& p, const ReservoirSpec& r,
                       const Eigen::VectorXd& v) {
    double total = 0.0;
    for (int j = 0; j < p.dim(); ++j) {
        for (int i = 0; i < j; ++i) {
            const double eji = p.bohr_frequency(j, i);
            const double g2 = eji * eji * angular_moment(r.form_factor, p, j, i);
            const double denom = std::expm1(r.beta * eji);
            total += (v(j) * std::exp(r.beta * eji) - v(i)) * eji * g2 / denom;
        }
    }
    return total;
}

} // namespace

double spectral_coupling(const ParticleSystem& p, const ReservoirSpec& r, int j, int i) {
    if (j <= i)
        throw config_error("spectral_coupling requires j > i");
    const double eji = p.bohr_frequency(j, i);
    return eji * eji * angular_moment(r.form_factor, p, j, i);
}

double eta_prime(const ParticleSystem& p,
                 const ReservoirSpec& r1, const ReservoirSpec& r2,
                 int which, const Eigen::VectorXd& gamma) {
    if (which != 1 && which != 2)
        throw config_error("reservoir index must be 1 or 2");
    const ReservoirSpec& r = (which == 1) ? r1 : r2;
    return 2.0 * kPi / std::sqrt(static_cast<double>(p.dim()))
         * flux_functional(p, r, gamma);
}

double entropy_production(double eta_prime_1, double g, double beta1, double beta2) {
    return (beta1 - beta2) * g * g * eta_prime_1;
}

LinearResponse linear_response(const ParticleSystem& p,
                               const ReservoirSpec& r1, const ReservoirSpec& r2) {
    if (!identical_couplings(r1.form_factor, r2.form_factor))
        throw config_error("linear_response requires identical form factors "
                           "on the two reservoirs");
    const int n = p.dim();
    const double beta1 = r1.beta;
    const ReservoirSpec at_beta1(beta1, r1.form_factor);

    const Eigen::MatrixXd gam = gamma_single_reservoir(p, at_beta1);
    Eigen::VectorXd psi(n), hpsi(n);
    for (int j = 0; j < n; ++j) {
        psi(j) = std::exp(-beta1 * p.energy(j) / 2.0);
        hpsi(j) = p.energy(j) * psi(j);
    }

    // First-order kernel correction: [Gamma_1 + Gamma_2] x = Gamma_2 H_p Psi,
    // minimal-norm solution (the kernel-direction component is immaterial).
    const Eigen::MatrixXd lhs = 2.0 * gam;
    const Eigen::VectorXd rhs = gam * hpsi;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(lhs);
    const Eigen::VectorXd x = cod.solve(rhs);

    const double c_beta = n / p.partition_function(beta1);
    Eigen::VectorXd zeta1(n);
    for (int j = 0; j < n; ++j)
        zeta1(j) = c_beta * std::exp(-beta1 * p.energy(j) / 2.0) * x(j);

    LinearResponse out;
    out.matrix_route = 2.0 * kPi / n * flux_functional(p, at_beta1, zeta1);

    double printed = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < j; ++k) {
            const double ejk = p.bohr_frequency(j, k);
            const double g2 = ejk * ejk * angular_moment(r1.form_factor, p, j, k);
            const double denom = std::exp(beta1 * p.energy(k)) * std::expm1(beta1 * ejk);
            printed += ejk * ejk * g2 / denom;
        }
    }
    out.closed_form = 0.5 * c_beta * printed;
    out.ratio = out.closed_form / out.matrix_route;
    return out;
}

ThermoReport thermo_report(const ParticleSystem& p,
                           const ReservoirSpec& r1, const ReservoirSpec& r2,
                           double g) {
    const NessSolution sol = solve_ness(p, r1, r2);
    ThermoReport rep;
    rep.g = g;
    rep.eta_prime_1 = eta_prime(p, r1, r2, 1, sol.gamma);
    rep.eta_prime_2 = eta_prime(p, r1, r2, 2, sol.gamma);
    rep.flux_sum = rep.eta_prime_1 + rep.eta_prime_2;
    rep.ep_leading = entropy_production(rep.eta_prime_1, g, r1.beta, r2.beta);
    if (identical_couplings(r1.form_factor, r2.form_factor))
        rep.linear_coefficient = linear_response(p, r1, r2).matrix_route;
    return rep;
}

SweepResult sweep(const ParticleSystem& p,
                  const ReservoirSpec& r1, const ReservoirSpec& r2,
                  const std::vector<double>& delta_beta_grid,
                  double g, int max_threads) {
    SweepResult result;
    std::vector<int> live;
    for (size_t i = 0; i < delta_beta_grid.size(); ++i) {
        if (r1.beta - delta_beta_grid[i] > 0.0)
            live.push_back(static_cast<int>(i));
        else
            result.skipped.push_back(delta_beta_grid[i]);
    }
    result.rows.resize(live.size());

    int threads = max_threads > 0 ? max_threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, static_cast<int>(live.size())));

    std::vector<std::exception_ptr> failures(static_cast<size_t>(threads));
    auto worker = [&](int tid) {
        try {
            for (size_t k = static_cast<size_t>(tid); k < live.size();
                 k += static_cast<size_t>(threads)) {
                const double db = delta_beta_grid[static_cast<size_t>(live[k])];
                const ReservoirSpec cold(r1.beta - db, r2.form_factor);
                const NessSolution sol = solve_ness(p, r1, cold);
                SweepRow row;
                row.delta_beta = db;
                row.gamma = sol.gamma;
                row.eta_prime_1 = eta_prime(p, r1, cold, 1, sol.gamma);
                row.eta_prime_2 = eta_prime(p, r1, cold, 2, sol.gamma);
                row.ep_leading = entropy_production(row.eta_prime_1, g, r1.beta, cold.beta);
                result.rows[k] = std::move(row);
            }
        } catch (...) {
            failures[static_cast<size_t>(tid)] = std::current_exception();
        }
    };

    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }
    for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);
    return result;
}

} // namespace nesskit
