#include "nesskit/feshbach.hpp"

#include <cmath>
#include <string>

#include "nesskit/errors.hpp"

namespace nesskit {

namespace {

// Orthonormal basis of the range of a projection via column-pivoted QR.
Eigen::MatrixXcd range_basis(const Eigen::MatrixXcd& p) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(p);
    qr.setThreshold(1e-12);
    const int rank = static_cast<int>(qr.rank());
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(p.rows(), rank);
    return q;
}

struct ComplementResolvent {
    Eigen::MatrixXcd basis;        // orthonormal basis of Ran(1-P)
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu; // factor of the restricted block
    double min_sv;

    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rhs_projected) const {
        // rhs must already lie in Ran(1-P) columnwise.
        return basis * lu.solve(basis.adjoint() * rhs_projected);
    }
};

ComplementResolvent complement_resolvent(const Eigen::MatrixXcd& h, const Projection& p) {
    ComplementResolvent r;
    const Eigen::MatrixXcd pbar = p.complement();
    r.basis = range_basis(pbar);
    if (r.basis.cols() == 0) {
        r.min_sv = std::numeric_limits<double>::infinity();
        return r;
    }
    const Eigen::MatrixXcd block = r.basis.adjoint() * pbar * h * pbar * r.basis;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(block);
    r.min_sv = svd.singularValues()(svd.singularValues().size() - 1);
    const double scale = std::max(1e-300, h.norm());
    if (r.min_sv <= 1e-12 * scale)
        throw numerical_error("outside Dom(F_P): complement block is singular "
                              "(smallest singular value " + std::to_string(r.min_sv) + ")");
    r.lu.compute(block);
    return r;
}

} // namespace

Projection::Projection(Eigen::MatrixXcd p) : p_(std::move(p)) {
    if (p_.rows() != p_.cols())
        throw config_error("projection must be square");
    const double defect = (p_ * p_ - p_).norm();
    if (defect > 1e-12 * (1.0 + p_.norm() * p_.norm()))
        throw config_error("matrix is not a projection: ||P^2 - P|| = "
                           + std::to_string(defect));
}

Eigen::MatrixXcd Projection::complement() const {
    return Eigen::MatrixXcd::Identity(p_.rows(), p_.cols()) - p_;
}

double Projection::skew() const {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(p_);
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

FeshbachResult feshbach_map(const Eigen::MatrixXcd& h, const Projection& p) {
    if (h.rows() != h.cols() || h.rows() != p.dim())
        throw config_error("feshbach_map dimension mismatch");

    FeshbachResult out;
    out.basis_skew = p.skew();
    out.basis = range_basis(p.matrix());

    const Eigen::MatrixXcd pbar = p.complement();
    if (range_basis(pbar).cols() == 0) {
        // Empty complement: F_P(H) = H.
        out.map = out.basis.adjoint() * h * out.basis;
        out.complement_min_sv = std::numeric_limits<double>::infinity();
        return out;
    }

    const ComplementResolvent r = complement_resolvent(h, p);
    out.complement_min_sv = r.min_sv;
    const Eigen::MatrixXcd& pm = p.matrix();
    const Eigen::MatrixXcd corr = h * r.apply(pbar * h * pm);
    const Eigen::MatrixXcd f = pm * (h * pm - corr);
    out.map = out.basis.adjoint() * f * out.basis;
    return out;
}

IsospectralityReport isospectrality_check(const Eigen::MatrixXcd& h, const Projection& p,
                                          double tol_scale) {
    IsospectralityReport rep{};
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd_h(h);
    rep.h_min_sv = svd_h.singularValues()(svd_h.singularValues().size() - 1);

    const FeshbachResult f = feshbach_map(h, p);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd_f(f.map, Eigen::ComputeFullV);
    rep.f_min_sv = svd_f.singularValues()(svd_f.singularValues().size() - 1);

    const double scale_h = std::max(1.0, h.norm());
    const double scale_f = std::max(1.0, f.map.norm());
    rep.h_singular = rep.h_min_sv <= tol_scale * scale_h;
    rep.f_singular = rep.f_min_sv <= tol_scale * scale_f;
    rep.consistent = (rep.h_singular == rep.f_singular);

    if (rep.f_singular) {
        // "<=" branch: reconstruct psi = (1 - R_P(H) H) phi and check H psi ~ 0.
        const Eigen::VectorXcd phi_coords = svd_f.matrixV().col(f.map.cols() - 1);
        const Eigen::VectorXcd phi = f.basis * phi_coords;
        const ComplementResolvent r = complement_resolvent(h, p);
        const Eigen::MatrixXcd pbar = p.complement();
        const Eigen::VectorXcd psi = phi - r.apply(pbar * (h * phi));
        rep.reconstruction_defect = (h * psi).norm() / (h.norm() * psi.norm());
    }
    return rep;
}

NeumannExpansion neumann_eigenvector(const Eigen::MatrixXcd& l0, const Eigen::MatrixXcd& i_op,
                                     double g, const Projection& p, int order,
                                     const std::optional<Eigen::VectorXcd>& psi0) {
    if (l0.rows() != l0.cols() || i_op.rows() != i_op.cols() || l0.rows() != i_op.rows()
        || l0.rows() != p.dim())
        throw config_error("neumann_eigenvector dimension mismatch");
    if (order < 0)
        throw config_error("expansion order must be nonnegative");

    const Eigen::MatrixXcd pbar = p.complement();
    const double block_defect = (p.matrix() * l0 * pbar).norm() + (pbar * l0 * p.matrix()).norm();
    if (block_defect > 1e-10 * (1.0 + l0.norm()))
        throw config_error("L0 must be block diagonal with respect to P");

    NeumannExpansion out;
    out.shift = Complex(0.0, 0.0);
    Eigen::VectorXcd seed;
    if (psi0) {
        seed = p.matrix() * (*psi0);
    } else {
        const Eigen::MatrixXcd k = l0 + g * i_op;
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(k);
        int idx = 0;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < es.eigenvalues().size(); ++i) {
            if (std::abs(es.eigenvalues()(i)) < best) {
                best = std::abs(es.eigenvalues()(i));
                idx = i;
            }
        }
        out.shift = es.eigenvalues()(idx);
        seed = p.matrix() * es.eigenvectors().col(idx);
        if (seed.norm() < 1e-12)
            throw physics_error("eigenvector has no overlap with Ran P");
    }
    out.seed = seed;

    const Eigen::MatrixXcd l0_eff = l0 - out.shift * Eigen::MatrixXcd::Identity(l0.rows(), l0.cols());
    const ComplementResolvent r = complement_resolvent(l0_eff, p);

    Eigen::VectorXcd term = seed;
    Eigen::VectorXcd sum = seed;
    out.term_norms.push_back(term.norm());
    for (int k = 1; k <= order; ++k) {
        term = -g * r.apply(pbar * (i_op * term));
        sum += term;
        out.term_norms.push_back(term.norm());
    }
    out.approx = sum;
    out.defect = ((l0_eff + g * i_op) * sum).norm();
    return out;
}

double neumann_defect_exponent(const Eigen::MatrixXcd& l0, const Eigen::MatrixXcd& i_op,
                               double g, const Projection& p, int order) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int m = 3;
    for (int k = 0; k < m; ++k) {
        const double gk = g / std::pow(2.0, k);
        const NeumannExpansion ex = neumann_eigenvector(l0, i_op, gk, p, order);
        const double x = std::log(gk);
        const double y = std::log(ex.defect);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

} // namespace nesskit
