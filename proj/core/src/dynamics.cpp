#include "nesskit/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "nesskit/errors.hpp"

namespace nesskit {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXd reservoir_rates(const ParticleSystem& p, const ReservoirSpec& r) {
    const int n = p.dim();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int m = 0; m < n; ++m) {
        for (int k = 0; k < n; ++k) {
            if (k == m) continue;
            const double emk = p.bohr_frequency(m, k);
            const double e = std::abs(emk);
            const double s = angular_moment(r.form_factor, p, m, k);
            // emission m -> k for E_m > E_k carries (1 + rho), absorption rho.
            double occ;
            if (emk > 0.0)
                occ = 1.0 / (-std::expm1(-r.beta * e)); // 1 + rho
            else
                occ = 1.0 / std::expm1(r.beta * e);     // rho
            w(k, m) = 2.0 * kPi * emk * emk * occ * s;
        }
    }
    return w;
}

// Connected components of the undirected graph with edges where any rate is nonzero.
std::vector<std::vector<int>> transition_components(const RateMatrix& rm) {
    const int n = static_cast<int>(rm.generator.rows());
    std::vector<int> comp(n, -1);
    std::vector<std::vector<int>> out;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        std::vector<int> stack{s}, members;
        comp[s] = static_cast<int>(out.size());
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            members.push_back(v);
            for (int u = 0; u < n; ++u) {
                if (u == v || comp[u] >= 0) continue;
                if (rm.w[0](u, v) > 0.0 || rm.w[0](v, u) > 0.0
                    || rm.w[1](u, v) > 0.0 || rm.w[1](v, u) > 0.0) {
                    comp[u] = comp[v];
                    stack.push_back(u);
                }
            }
        }
        out.push_back(std::move(members));
    }
    return out;
}

double eigenbasis_condition(const Eigen::MatrixXcd& v) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(v);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return svd.singularValues()(0) / smin;
}

} // namespace

RateMatrix build_generator(const ParticleSystem& p,
                           const ReservoirSpec& r1,
                           const ReservoirSpec& r2) {
    RateMatrix rm;
    rm.w[0] = reservoir_rates(p, r1);
    rm.w[1] = reservoir_rates(p, r2);
    rm.energies = p.energies();
    const int n = p.dim();
    rm.generator = rm.w[0] + rm.w[1];
    for (int m = 0; m < n; ++m) {
        rm.generator(m, m) = 0.0;
        double escape = 0.0;
        for (int k = 0; k < n; ++k)
            if (k != m) escape += rm.w[0](k, m) + rm.w[1](k, m);
        rm.generator(m, m) = -escape;
    }
    return rm;
}

Eigen::VectorXd stationary_distribution(const RateMatrix& rm) {
    const int n = static_cast<int>(rm.generator.rows());
    if (n == 1) return Eigen::VectorXd::Ones(1);

    Eigen::EigenSolver<Eigen::MatrixXd> es(rm.generator);
    const double scale = 1.0 + rm.generator.cwiseAbs().maxCoeff();
    int zeros = 0, idx = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double a = std::abs(es.eigenvalues()(i));
        if (a <= 1e-10 * scale) ++zeros;
        if (a < best) {
            best = a;
            idx = i;
        }
    }
    if (zeros != 1) {
        auto comps = transition_components(rm);
        std::string msg = "stationary distribution is not unique ("
                          + std::to_string(zeros) + " near-zero eigenvalues); "
                          "transition graph components:";
        for (const auto& c : comps) {
            msg += " {";
            for (size_t i = 0; i < c.size(); ++i)
                msg += (i ? "," : "") + std::to_string(c[i]);
            msg += "}";
        }
        throw physics_error(msg);
    }

    Eigen::VectorXcd v = es.eigenvectors().col(idx);
    const Complex lambda = es.eigenvalues()(idx);
    // One inverse-iteration sweep sharpens the kernel vector; the shift is
    // offset by a sliver so the factorization stays regular.
    const Eigen::MatrixXcd mc = rm.generator.cast<Complex>();
    const double sliver = 1e-13 * (1.0 + rm.generator.norm());
    Eigen::MatrixXcd shifted = mc - (lambda + sliver) * Eigen::MatrixXcd::Identity(n, n);
    Eigen::VectorXcd refined = Eigen::FullPivLU<Eigen::MatrixXcd>(shifted).solve(v);
    if (refined.allFinite() && refined.norm() > 0.0) {
        refined /= refined.norm();
        if ((mc * refined - lambda * refined).norm() <= (mc * v - lambda * v).norm())
            v = refined;
    }

    Eigen::VectorXd real = v.real();
    int peak = 0;
    real.cwiseAbs().maxCoeff(&peak);
    if (real(peak) < 0.0) real = -real;
    const double neg = real.minCoeff();
    if (neg < -1e-9 * real.maxCoeff())
        throw numerical_error("stationary vector has sign changes; kernel solve failed");
    real = real.cwiseMax(0.0);
    return real / real.sum();
}

Trajectory evolve(const RateMatrix& rm, const Eigen::VectorXd& p0,
                  double g, const std::vector<double>& t_grid) {
    const int n = static_cast<int>(rm.generator.rows());
    if (p0.size() != n)
        throw config_error("initial state dimension mismatch");
    if (p0.minCoeff() < 0.0 || std::abs(p0.sum() - 1.0) > 1e-12)
        throw config_error("initial state must be a probability vector");
    for (size_t i = 0; i + 1 < t_grid.size(); ++i)
        if (!(t_grid[i + 1] > t_grid[i]))
            throw config_error("time grid must be strictly increasing");
    if (!t_grid.empty() && t_grid.front() < 0.0)
        throw config_error("time grid must be nonnegative");

    Trajectory out;
    out.times = t_grid;
    out.populations.resize(static_cast<int>(t_grid.size()), n);
    out.fluxes.resize(static_cast<int>(t_grid.size()), 2);

    Eigen::EigenSolver<Eigen::MatrixXd> es(rm.generator);
    const bool use_eig = eigenbasis_condition(es.eigenvectors()) < 1e8;
    Eigen::PartialPivLU<Eigen::MatrixXcd> vlu;
    Eigen::VectorXcd coeffs;
    if (use_eig) {
        vlu.compute(es.eigenvectors());
        coeffs = vlu.solve(p0.cast<Complex>());
    }

    for (size_t it = 0; it < t_grid.size(); ++it) {
        const double s = g * g * t_grid[it];
        Eigen::VectorXd pt;
        if (use_eig) {
            Eigen::VectorXcd scaled(n);
            for (int i = 0; i < n; ++i)
                scaled(i) = coeffs(i) * std::exp(es.eigenvalues()(i) * s);
            pt = (es.eigenvectors() * scaled).real();
        } else {
            pt = (rm.generator * s).exp() * p0;
        }
        if (std::abs(pt.sum() - 1.0) > 1e-10)
            throw numerical_error("trajectory lost normalization at t = "
                                  + std::to_string(t_grid[it]));
        if (pt.minCoeff() < -1e-12)
            throw numerical_error("trajectory left the probability simplex at t = "
                                  + std::to_string(t_grid[it]));
        out.populations.row(static_cast<int>(it)) = pt.transpose();
        out.fluxes(static_cast<int>(it), 0) = stationary_flux(rm, pt, 1);
        out.fluxes(static_cast<int>(it), 1) = stationary_flux(rm, pt, 2);
    }
    return out;
}

ConvergenceRate convergence_rate(const RateMatrix& rm, double g) {
    const int n = static_cast<int>(rm.generator.rows());
    ConvergenceRate out{};
    Eigen::EigenSolver<Eigen::MatrixXd> es(rm.generator);
    const double scale = 1.0 + rm.generator.cwiseAbs().maxCoeff();

    double gap = std::numeric_limits<double>::infinity();
    Complex slow(0, 0);
    int slow_idx = 0;
    for (int i = 0; i < n; ++i) {
        const Complex ev = es.eigenvalues()(i);
        if (std::abs(ev) <= 1e-10 * scale) continue;
        if (std::abs(ev.real()) < gap) {
            gap = std::abs(ev.real());
            slow = ev;
            slow_idx = i;
        }
    }
    out.spectral = g * g * gap;
    out.complex_slow_mode = std::abs(slow.imag()) > 1e-12 * std::abs(slow.real());
    out.defective = eigenbasis_condition(es.eigenvectors()) > 1e12;

    const Eigen::VectorXd pstar = stationary_distribution(rm);

    // Perturb the stationary state along the slow mode (its components sum to
    // zero, so the perturbed state is still a distribution).
    Eigen::VectorXd dir = es.eigenvectors().col(slow_idx).real();
    if (dir.norm() < 1e-12) dir = es.eigenvectors().col(slow_idx).imag();
    dir /= dir.cwiseAbs().maxCoeff();
    const double eps = 0.5 * pstar.minCoeff();
    Eigen::VectorXd p0 = pstar + eps * dir;
    p0 = p0.cwiseMax(0.0);
    p0 /= p0.sum();

    const double t_unit = 1.0 / (g * g * gap);
    std::vector<double> ts;
    const int samples = 25;
    for (int i = 0; i < samples; ++i)
        ts.push_back((2.0 + 6.0 * i / (samples - 1.0)) * t_unit);
    Trajectory tr = evolve(rm, p0, g, ts);

    // Least-squares slope of log ||p(t) - p*||.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int i = 0; i < samples; ++i) {
        const double r = (tr.populations.row(i).transpose() - pstar).norm();
        if (r < 1e-13) continue;
        const double x = ts[static_cast<size_t>(i)];
        const double y = std::log(r);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++m;
    }
    if (m < 2)
        throw numerical_error("decay fit has too few usable samples");
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    out.fitted = -slope;
    return out;
}

double stationary_flux(const RateMatrix& rm, const Eigen::VectorXd& p, int which) {
    if (which != 1 && which != 2)
        throw config_error("reservoir index must be 1 or 2");
    const Eigen::MatrixXd& w = rm.w[static_cast<size_t>(which - 1)];
    const int n = static_cast<int>(rm.generator.rows());
    double flux = 0.0;
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < m; ++k) {
            const double e = rm.energies(m) - rm.energies(k);
            flux += e * (w(k, m) * p(m) - w(m, k) * p(k));
        }
    return flux;
}

} // namespace nesskit
