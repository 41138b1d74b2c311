#include "nesskit/model.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "nesskit/errors.hpp"

namespace nesskit {

namespace {

void check_index(const ParticleSystem& p, int n, const char* name) {
    if (n < 0 || n >= p.dim())
        throw config_error(std::string(name) + " index out of range: " + std::to_string(n)
                           + " for N = " + std::to_string(p.dim()));
}

} // namespace

ParticleSystem::ParticleSystem(Eigen::VectorXd energies, double beta_p)
    : energies_(std::move(energies)), beta_p_(beta_p) {
    if (energies_.size() < 1)
        throw config_error("particle system needs at least one energy level");
    for (int i = 0; i < energies_.size(); ++i) {
        if (!std::isfinite(energies_(i)))
            throw config_error("particle energies must be finite");
    }
    for (int i = 0; i + 1 < energies_.size(); ++i) {
        if (!(energies_(i + 1) - energies_(i) > 0.0))
            throw config_error("Condition (C) violated: degenerate spectrum "
                               "(energies must be strictly increasing)");
    }
    if (!(beta_p_ >= 0.0) || !std::isfinite(beta_p_))
        throw config_error("beta_p must be a finite nonnegative real");
}

double ParticleSystem::bohr_frequency(int m, int n) const {
    check_index(*this, m, "level");
    check_index(*this, n, "level");
    return energies_(m) - energies_(n);
}

double ParticleSystem::min_level_spacing() const {
    if (dim() < 2)
        throw physics_error("level spacing undefined for a single-level system");
    double s = energies_(1) - energies_(0);
    for (int i = 1; i + 1 < dim(); ++i)
        s = std::min(s, energies_(i + 1) - energies_(i));
    return s;
}

Eigen::VectorXd ParticleSystem::gibbs_vector(double beta) const {
    if (!(beta >= 0.0))
        throw config_error("gibbs_vector requires beta >= 0");
    // Shift by the ground energy; the expression is invariant and this keeps
    // the exponentials bounded for large beta.
    const double e0 = energies_(0);
    double z = 0.0;
    for (int k = 0; k < dim(); ++k) z += std::exp(-beta * (energies_(k) - e0));
    Eigen::VectorXd v(dim());
    const double s = std::sqrt(z);
    for (int j = 0; j < dim(); ++j)
        v(j) = std::exp(-beta * (energies_(j) - e0) / 2.0) / s;
    return v;
}

double ParticleSystem::partition_function(double beta) const {
    double z = 0.0;
    for (int k = 0; k < dim(); ++k) z += std::exp(-beta * energies_(k));
    return z;
}

bool ParticleSystem::has_degenerate_bohr_frequencies(double tol) const {
    const int n = dim();
    std::vector<double> freqs;
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < m; ++k)
            freqs.push_back(energies_(m) - energies_(k));
    for (size_t a = 0; a < freqs.size(); ++a)
        for (size_t b = a + 1; b < freqs.size(); ++b)
            if (std::abs(freqs[a] - freqs[b]) <= tol)
                return true;
    return false;
}

FormFactor FormFactor::power_gaussian(double exponent, double scale, Eigen::MatrixXcd coupling) {
    if (!(exponent > 0.0))
        throw config_error("power_gaussian form factor requires alpha > 0 "
                           "(the norm integrals diverge otherwise)");
    if (!(scale > 0.0))
        throw config_error("power_gaussian form factor requires a positive amplitude scale");
    if (coupling.rows() != coupling.cols())
        throw config_error("coupling matrix must be square");
    const double herm_defect = (coupling - coupling.adjoint()).cwiseAbs().maxCoeff();
    if (herm_defect > 1e-12 * (1.0 + coupling.cwiseAbs().maxCoeff()))
        throw config_error("coupling matrix must be Hermitian (defect "
                           + std::to_string(herm_defect) + ")");
    return FormFactor(PowerGaussian{exponent, scale, std::move(coupling)});
}

FormFactor FormFactor::angular_moments(Eigen::MatrixXd moments) {
    if (moments.rows() != moments.cols())
        throw config_error("angular moment table must be square");
    for (int m = 0; m < moments.rows(); ++m) {
        for (int n = 0; n < moments.cols(); ++n) {
            if (moments(m, n) < 0.0)
                throw config_error("angular moments must be nonnegative");
            if (std::abs(moments(m, n) - moments(n, m)) > 1e-12 * (1.0 + moments.cwiseAbs().maxCoeff()))
                throw config_error("angular moment table must be symmetric");
        }
    }
    return FormFactor(AngularMoments{std::move(moments)});
}

const FormFactor::PowerGaussian& FormFactor::power_gaussian_form() const {
    if (auto* pg = std::get_if<PowerGaussian>(&data_)) return *pg;
    throw physics_error("operation requires the power_gaussian form factor variant "
                        "(angular_moments carries no off-resonance radial data)");
}

const FormFactor::AngularMoments& FormFactor::angular_moment_table() const {
    if (auto* am = std::get_if<AngularMoments>(&data_)) return *am;
    throw physics_error("form factor has no angular moment table");
}

int FormFactor::dim() const {
    if (auto* pg = std::get_if<PowerGaussian>(&data_))
        return static_cast<int>(pg->coupling.rows());
    return static_cast<int>(std::get<AngularMoments>(data_).moments.rows());
}

Eigen::MatrixXcd FormFactor::evaluate(const Eigen::Vector3d& k) const {
    const auto& pg = power_gaussian_form();
    return radial_profile(k.norm()) * pg.coupling;
}

double FormFactor::radial_profile(double r) const {
    const auto& pg = power_gaussian_form();
    if (r == 0.0) return 0.0;
    return pg.scale * std::pow(r, pg.exponent) * std::exp(-r * r);
}

double FormFactor::coupling_operator_norm() const {
    const auto& pg = power_gaussian_form();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pg.coupling);
    return svd.singularValues()(0);
}

ReservoirSpec::ReservoirSpec(double beta_in, FormFactor ff)
    : beta(beta_in), form_factor(std::move(ff)) {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw config_error("reservoir inverse temperature must be positive and finite");
}

double angular_moment(const FormFactor& ff, const ParticleSystem& p, int m, int n) {
    check_index(p, m, "level");
    check_index(p, n, "level");
    if (m == n)
        throw config_error("angular_moment requires m != n");
    const double e = std::abs(p.bohr_frequency(m, n));
    if (ff.is_power_gaussian()) {
        const auto& pg = ff.power_gaussian_form();
        if (pg.coupling.rows() != p.dim())
            throw config_error("coupling matrix dimension does not match the energy count");
        const double b = std::abs(pg.coupling(n, m));
        const double pi = 3.14159265358979323846;
        return 4.0 * pi * pg.scale * pg.scale * std::pow(e, 2.0 * pg.exponent)
             * std::exp(-2.0 * e * e) * b * b;
    }
    const auto& table = ff.angular_moment_table().moments;
    if (table.rows() != p.dim())
        throw config_error("angular moment table dimension does not match the energy count");
    return table(m, n);
}

Complex glue(const std::function<Complex(const Eigen::Vector3d&)>& f,
             double u, const Eigen::Vector3d& sigma) {
    const double root = std::sqrt(std::abs(u));
    if (u >= 0.0) return root * f(u * sigma);
    return -root * std::conj(f(-u * sigma));
}

Eigen::MatrixXcd glue(const std::function<Eigen::MatrixXcd(const Eigen::Vector3d&)>& f,
                      double u, const Eigen::Vector3d& sigma) {
    const double root = std::sqrt(std::abs(u));
    if (u >= 0.0) return root * f(u * sigma);
    return -root * f(-u * sigma).conjugate();
}

Eigen::MatrixXcd glued_interaction_eval(const ParticleSystem& p,
                                        const ReservoirSpec& r1,
                                        const ReservoirSpec& r2,
                                        GluedComponent which,
                                        double u,
                                        const Eigen::Vector3d& sigma,
                                        int alpha_idx,
                                        double unit_tol) {
    if (alpha_idx != 1 && alpha_idx != 2)
        throw config_error("reservoir index must be 1 or 2");
    if (std::abs(sigma.norm() - 1.0) > unit_tol)
        throw config_error("sigma must be a unit vector");

    const ReservoirSpec& res = (alpha_idx == 1) ? r1 : r2;
    const double beta = std::max(r1.beta, r2.beta);
    const double dba = res.beta - beta;      // <= 0
    const double dbp = p.beta_p() - beta;
    const int n = p.dim();

    // sqrt(u / (1 - e^{-beta u})) with the continuous extension u/beta at u -> 0.
    double ratio;
    if (u == 0.0)
        ratio = 1.0 / res.beta;
    else
        ratio = u / (-std::expm1(-res.beta * u));
    const double pref = std::sqrt(ratio);

    const Eigen::MatrixXcd g = res.form_factor.evaluate(std::abs(u) * sigma);
    const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(n, n);

    const double sign_exp = (which == GluedComponent::F1) ? 1.0 : -1.0;
    const double weight = std::exp(-res.beta * u / 2.0) * std::exp(sign_exp * dba * u / 2.0);

    // alpha_p^{+- i dbp/2}(A) = e^{-+ dbp H_p/2} A e^{+- dbp H_p/2} in the energy basis.
    Eigen::VectorXd conj_scale(n);
    for (int j = 0; j < n; ++j)
        conj_scale(j) = std::exp(-sign_exp * dbp * p.energy(j) / 2.0);

    Eigen::MatrixXcd left, right;
    if (u >= 0.0) {
        left = g;                       // G(u sigma)
        right = g.transpose();          // conj(G)^* = G^T
    } else {
        left = g.adjoint();             // G^*(-u sigma)
        right = g.conjugate();          // conj(G)(-u sigma)
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            right(a, b) *= conj_scale(a) / conj_scale(b);

    const double root = (u >= 0.0) ? std::sqrt(u) : -std::sqrt(-u);
    Eigen::MatrixXcd value = Eigen::kroneckerProduct(left, identity).eval()
                           - weight * Eigen::kroneckerProduct(identity, right).eval();
    return pref * root * value;
}

} // namespace nesskit
