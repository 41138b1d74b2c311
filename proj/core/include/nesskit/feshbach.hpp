#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nesskit/model.hpp"

namespace nesskit {

// A (not necessarily orthogonal) projection P on C^n, validated idempotent.
class Projection {
public:
    explicit Projection(Eigen::MatrixXcd p);

    const Eigen::MatrixXcd& matrix() const { return p_; }
    Eigen::MatrixXcd complement() const;
    int dim() const { return static_cast<int>(p_.rows()); }
    // ||P||_2; 1 for orthogonal projections, larger for skew ones.
    double skew() const;

private:
    Eigen::MatrixXcd p_;
};

struct FeshbachResult {
    Eigen::MatrixXcd map;          // F_P(H) in the returned basis of Ran P
    Eigen::MatrixXcd basis;        // orthonormal columns spanning Ran P
    double complement_min_sv;      // smallest singular value of H restricted to Ran(1-P)
    double basis_skew;             // ||P||_2
};

// F_P(H) = P (H - H R_P(H) H) P with R_P(H) the inverse of (1-P)H(1-P) on
// Ran(1-P). Throws when that block is near-singular (outside Dom(F_P)).
// P = identity returns H itself (empty-complement convention).
FeshbachResult feshbach_map(const Eigen::MatrixXcd& h, const Projection& p);

struct IsospectralityReport {
    double h_min_sv;
    double f_min_sv;
    bool h_singular;
    bool f_singular;
    bool consistent;               // singularity verdicts agree
    std::optional<double> reconstruction_defect; // ||H psi|| / (||H|| ||psi||) on the <= branch
};

IsospectralityReport isospectrality_check(const Eigen::MatrixXcd& h, const Projection& p,
                                          double tol_scale = 1e-9);

struct NeumannExpansion {
    Eigen::VectorXcd approx;           // sum_{k<=order} g^k (-R0 I)^k P psi0
    double defect;                     // ||(L0 + g I - shift) approx||
    Complex shift;                     // eigenvalue removed when psi0 was computed
    Eigen::VectorXcd seed;             // P psi0
    std::vector<double> term_norms;    // per-order term norms
};

// Truncated Neumann expansion of the kernel eigenvector of L0 + g I through
// the complement resolvent of L0. L0 must be block w.r.t. P with an invertible
// complement block. When psi0 is not supplied, the eigenvector of L0 + g I
// with eigenvalue nearest zero is used and that eigenvalue is subtracted from
// L0, so the expansion targets an exact kernel.
NeumannExpansion neumann_eigenvector(const Eigen::MatrixXcd& l0, const Eigen::MatrixXcd& i_op,
                                     double g, const Projection& p, int order,
                                     const std::optional<Eigen::VectorXcd>& psi0 = std::nullopt);

// Defect exponent fitted over {g, g/2, g/4}; O(g^{order+1}) gives order + 1.
double neumann_defect_exponent(const Eigen::MatrixXcd& l0, const Eigen::MatrixXcd& i_op,
                               double g, const Projection& p, int order);

} // namespace nesskit
