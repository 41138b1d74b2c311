#include "nesskit/quadrature.hpp"

#include <cmath>
#include <limits>
#include <algorithm>
#include <vector>

#include "nesskit/errors.hpp"

namespace nesskit {

namespace {

// 15-point Kronrod nodes on [0,1] side (symmetric), with the embedded
// 7-point Gauss rule on the odd-indexed nodes.
constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kKronrodNodes[i]);
        fv[14 - i] = f(c + h * kKronrodNodes[i]);
    }
    fv[7] = f(c);

    double kr = kKronrodWeights[7] * fv[7];
    for (int i = 0; i < 7; ++i)
        kr += kKronrodWeights[i] * (fv[i] + fv[14 - i]);
    kr *= h;

    double ga = kGaussWeights[3] * fv[7];
    for (int i = 0; i < 3; ++i)
        ga += kGaussWeights[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    ga *= h;

    if (!std::isfinite(kr) || !std::isfinite(ga))
        throw numerical_error("quadrature panel produced a non-finite value on ["
                              + std::to_string(a) + ", " + std::to_string(b) + "]");
    return {a, b, kr, std::abs(kr - ga)};
}

} // namespace

double integrate_adaptive(const std::function<double(double)>& f,
                          double a, double b, double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    if (b < a) return -integrate_adaptive(f, b, a, abs_tol, max_depth);

    // Worst-panel-first refinement; handles integrable endpoint singularities
    // where a fixed per-level tolerance split would not.
    auto worse = [](const Panel& x, const Panel& y) { return x.error < y.error; };
    std::vector<Panel> heap{gk15(f, a, b)};
    const size_t max_panels = size_t(1) << std::min(max_depth, 14);

    auto err_total = [&] {
        double e = 0.0;
        for (const Panel& p : heap) e += p.error;
        return e;
    };

    while (err_total() > abs_tol) {
        if (heap.size() >= max_panels)
            throw numerical_error("adaptive quadrature did not converge: "
                                  + std::to_string(heap.size()) + " panels, error "
                                  + std::to_string(err_total()));
        std::pop_heap(heap.begin(), heap.end(), worse);
        const Panel p = heap.back();
        heap.pop_back();
        const double m = 0.5 * (p.a + p.b);
        if (m <= p.a || m >= p.b)
            throw numerical_error("adaptive quadrature hit an unresolvable point at "
                                  + std::to_string(p.a));
        heap.push_back(gk15(f, p.a, m));
        std::push_heap(heap.begin(), heap.end(), worse);
        heap.push_back(gk15(f, m, p.b));
        std::push_heap(heap.begin(), heap.end(), worse);
    }

    double sum = 0.0;
    for (const Panel& p : heap) sum += p.value;
    return sum;
}

GaussLegendreRule gauss_legendre(int n) {
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton iteration from the Chebyshev estimate of the i-th root.
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

} // namespace nesskit
