#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "nesskit/model.hpp"

namespace nesskit {

// Golden-rule transition rates for the two-reservoir Pauli master equation.
// w[j](n, m) is the rate m -> n fed by reservoir j+1; the generator M acts on
// population column vectors, dp/dt = g^2 M p, with zero column sums.
struct RateMatrix {
    std::array<Eigen::MatrixXd, 2> w;
    Eigen::MatrixXd generator;
    Eigen::VectorXd energies;
};

// Builds W and M from the model. Shares only angular_moment with the
// levelshift construction; the occupation factors are computed independently.
RateMatrix build_generator(const ParticleSystem& p,
                           const ReservoirSpec& r1,
                           const ReservoirSpec& r2);

// Kernel of M, normalized to a probability vector. Throws physics_error when
// the kernel is degenerate (disconnected transition graph; components listed).
Eigen::VectorXd stationary_distribution(const RateMatrix& rm);

struct Trajectory {
    std::vector<double> times;
    Eigen::MatrixXd populations; // one row per time point
    Eigen::MatrixXd fluxes;      // columns: reservoir 1, reservoir 2
};

// p(t) = exp(g^2 M t) p0. Eigen-decomposition when the eigenvector basis is
// well conditioned, otherwise scaling-and-squaring.
Trajectory evolve(const RateMatrix& rm, const Eigen::VectorXd& p0,
                  double g, const std::vector<double>& t_grid);

struct ConvergenceRate {
    double spectral;        // g^2 x smallest nonzero |Re lambda| of M
    double fitted;          // least-squares decay rate of ||p(t) - p*||
    bool defective;         // eigenvector basis too ill-conditioned to certify
    bool complex_slow_mode; // slowest mode has a nonzero imaginary part
};

ConvergenceRate convergence_rate(const RateMatrix& rm, double g);

// Energy current into reservoir `which` (1 or 2) in the state p:
// sum_{m>n} E_{mn} [W_{n<-m} p_m - W_{m<-n} p_n].
double stationary_flux(const RateMatrix& rm, const Eigen::VectorXd& p, int which);

} // namespace nesskit
