#include <benchmark/benchmark.h>

#include <random>

#include "nesskit/dynamics.hpp"
#include "nesskit/feshbach.hpp"
#include "nesskit/ness.hpp"
#include "nesskit/thresholds.hpp"

namespace {

nesskit::ParticleSystem make_particle(int n) {
    Eigen::VectorXd e(n);
    for (int i = 0; i < n; ++i) e(i) = 0.4 * i + 0.03 * i * i;
    return nesskit::ParticleSystem(e);
}

nesskit::ReservoirSpec make_reservoir(int n, double beta, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::MatrixXcd a(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) a(r, c) = {dist(rng), dist(rng)};
    Eigen::MatrixXcd b = 0.5 * (a + a.adjoint());
    return nesskit::ReservoirSpec(beta, nesskit::FormFactor::power_gaussian(0.5, 1.0, b));
}

void BM_SolveNess(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto p = make_particle(n);
    const auto r1 = make_reservoir(n, 1.0, 11);
    const auto r2 = make_reservoir(n, 0.5, 12);
    for (auto _ : state)
        benchmark::DoNotOptimize(nesskit::solve_ness(p, r1, r2));
}
BENCHMARK(BM_SolveNess)->Arg(4)->Arg(8);

void BM_BuildGenerator(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto p = make_particle(n);
    const auto r1 = make_reservoir(n, 1.0, 21);
    const auto r2 = make_reservoir(n, 0.5, 22);
    for (auto _ : state)
        benchmark::DoNotOptimize(nesskit::build_generator(p, r1, r2));
}
BENCHMARK(BM_BuildGenerator)->Arg(8);

void BM_ConditionBNorm(benchmark::State& state) {
    const auto r = make_reservoir(4, 1.0, 31);
    for (auto _ : state)
        benchmark::DoNotOptimize(nesskit::condition_b_norm(r, 0.5, 1.2));
}
BENCHMARK(BM_ConditionBNorm);

void BM_Evolve(benchmark::State& state) {
    const int n = 6;
    const auto p = make_particle(n);
    const auto r1 = make_reservoir(n, 1.0, 41);
    const auto r2 = make_reservoir(n, 0.5, 42);
    const auto rm = nesskit::build_generator(p, r1, r2);
    std::vector<double> times;
    for (int i = 0; i < 200; ++i) times.push_back(0.5 * (i + 1));
    const Eigen::VectorXd p0 = Eigen::VectorXd::Constant(n, 1.0 / n);
    for (auto _ : state)
        benchmark::DoNotOptimize(nesskit::evolve(rm, p0, 0.5, times));
}
BENCHMARK(BM_Evolve);

void BM_FeshbachMap(benchmark::State& state) {
    const int n = 64, r = 8;
    std::mt19937 rng(51);
    std::normal_distribution<double> dist;
    Eigen::MatrixXcd h(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) h(a, b) = {dist(rng), dist(rng)};
    Eigen::MatrixXcd pm = Eigen::MatrixXcd::Zero(n, n);
    pm.topLeftCorner(r, r).setIdentity();
    const nesskit::Projection proj(pm);
    for (auto _ : state)
        benchmark::DoNotOptimize(nesskit::feshbach_map(h, proj));
}
BENCHMARK(BM_FeshbachMap);

} // namespace

BENCHMARK_MAIN();
