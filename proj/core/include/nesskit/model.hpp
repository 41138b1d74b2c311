#pragma once

#include <complex>
#include <functional>
#include <variant>

#include <Eigen/Dense>

namespace nesskit {

using Complex = std::complex<double>;

// N-level particle system with ordered non-degenerate spectrum, expressed in
// the energy eigenbasis (hbar = k_B = 1). Immutable after construction.
class ParticleSystem {
public:
    explicit ParticleSystem(Eigen::VectorXd energies, double beta_p = 0.0);

    int dim() const { return static_cast<int>(energies_.size()); }
    const Eigen::VectorXd& energies() const { return energies_; }
    double energy(int n) const { return energies_(n); }
    double beta_p() const { return beta_p_; }

    // E_m - E_n.
    double bohr_frequency(int m, int n) const;

    // Smallest spacing of the particle spectrum (requires N >= 2).
    double min_level_spacing() const;

    // Normalized thermal vector with components e^{-beta E_j/2} / (sum_k e^{-beta E_k})^{1/2}.
    Eigen::VectorXd gibbs_vector(double beta) const;

    // tr e^{-beta H_p}.
    double partition_function(double beta) const;

    // True when two distinct level pairs share a nonzero Bohr frequency
    // within tol (then the nonzero eigenvalues of L_p are not simple).
    bool has_degenerate_bohr_frequencies(double tol = 1e-10) const;

private:
    Eigen::VectorXd energies_;
    double beta_p_;
};

// Coupling form factor G(k), one of two variants:
//   power_gaussian:  G(k) = c |k|^alpha e^{-|k|^2} B with B Hermitian,
//   angular_moments: only the sphere integrals S_{mn} at the Bohr frequencies.
class FormFactor {
public:
    struct PowerGaussian {
        double exponent;          // alpha > 0
        double scale;             // c > 0
        Eigen::MatrixXcd coupling; // B, Hermitian
    };
    struct AngularMoments {
        Eigen::MatrixXd moments;  // S_{mn} >= 0, symmetric, zero diagonal ignored
    };

    static FormFactor power_gaussian(double exponent, double scale, Eigen::MatrixXcd coupling);
    static FormFactor angular_moments(Eigen::MatrixXd moments);

    bool is_power_gaussian() const { return std::holds_alternative<PowerGaussian>(data_); }
    // Throws physics_error when the variant lacks the requested data.
    const PowerGaussian& power_gaussian_form() const;
    const AngularMoments& angular_moment_table() const;

    int dim() const;

    // Pointwise G(k) (power_gaussian only).
    Eigen::MatrixXcd evaluate(const Eigen::Vector3d& k) const;

    // Radial scalar profile c r^alpha e^{-r^2} (power_gaussian only).
    double radial_profile(double r) const;

    // Operator norm of the coupling matrix B (power_gaussian only).
    double coupling_operator_norm() const;

private:
    explicit FormFactor(std::variant<PowerGaussian, AngularMoments> data) : data_(std::move(data)) {}
    std::variant<PowerGaussian, AngularMoments> data_;
};

// One thermal reservoir: inverse temperature and its coupling form factor.
struct ReservoirSpec {
    double beta;
    FormFactor form_factor;

    ReservoirSpec(double beta_in, FormFactor ff);
};

// S_{mn} = int_{S^2} |G(|E_{mn}| sigma)_{nm}|^2 dsigma for m != n. For the
// power_gaussian variant this is the closed form 4 pi c^2 |E|^{2 alpha} e^{-2 E^2} |B_{nm}|^2.
double angular_moment(const FormFactor& ff, const ParticleSystem& p, int m, int n);

// The gluing map (gamma f)(u, sigma): sqrt(|u|) f(u sigma) for u >= 0 and
// -sqrt(|u|) conj(f)(-u sigma) for u < 0 (entrywise conjugate for matrices).
Complex glue(const std::function<Complex(const Eigen::Vector3d&)>& f,
             double u, const Eigen::Vector3d& sigma);
Eigen::MatrixXcd glue(const std::function<Eigen::MatrixXcd(const Eigen::Vector3d&)>& f,
                      double u, const Eigen::Vector3d& sigma);

enum class GluedComponent { F1, F2 };

// Value of the glued interaction F_1 or F_2 at (u, sigma, alpha_idx) on the
// doubled N^2-dimensional particle space (Kronecker-product realization).
// alpha_idx selects the reservoir (1 or 2); sigma must be a unit vector.
Eigen::MatrixXcd glued_interaction_eval(const ParticleSystem& p,
                                        const ReservoirSpec& r1,
                                        const ReservoirSpec& r2,
                                        GluedComponent which,
                                        double u,
                                        const Eigen::Vector3d& sigma,
                                        int alpha_idx,
                                        double unit_tol = 1e-9);

} // namespace nesskit
