#pragma once

#include <functional>
#include <vector>

namespace nesskit {

// Adaptive Gauss-Kronrod (15|7) integration of f on the finite interval [a, b].
// Bisects until the Kronrod error estimate of every panel is below its share of
// abs_tol. Throws numerical_error if the subdivision limit is reached before
// the tolerance is met. Integrable endpoint singularities are acceptable.
double integrate_adaptive(const std::function<double(double)>& f,
                          double a, double b,
                          double abs_tol = 1e-10,
                          int max_depth = 60);

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussLegendreRule gauss_legendre(int n);

} // namespace nesskit
