#include <benchmark/benchmark.h>

#include <trimode/entanglement.hpp>
#include <trimode/langevin.hpp>
#include <trimode/lyapunov.hpp>
#include <trimode/model.hpp>
#include <trimode/params.hpp>
#include <trimode/sweep.hpp>

#include <random>

using namespace trimode;

namespace {

const SystemParams& base() {
    static const SystemParams p{};
    return p;
}

void BM_derive_and_drift(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(drift_matrix(base()));
    }
}
BENCHMARK(BM_derive_and_drift);

void BM_stability(benchmark::State& state) {
    const Matrix6 K = drift_matrix(base());
    for (auto _ : state) {
        benchmark::DoNotOptimize(stability(K));
    }
}
BENCHMARK(BM_stability);

void BM_solve_lyapunov(benchmark::State& state) {
    const Matrix6 K = drift_matrix(base());
    const Matrix6 D = diffusion_matrix(base());
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_lyapunov(K, D));
    }
}
BENCHMARK(BM_solve_lyapunov);

void BM_symplectic_eigenvalues(benchmark::State& state) {
    const Matrix6 V = solve_lyapunov(drift_matrix(base()), diffusion_matrix(base()));
    for (auto _ : state) {
        benchmark::DoNotOptimize(symplectic_eigenvalues(V));
    }
}
BENCHMARK(BM_symplectic_eigenvalues);

void BM_pair_negativity_closed_form(benchmark::State& state) {
    const Matrix6 V = solve_lyapunov(drift_matrix(base()), diffusion_matrix(base()));
    for (auto _ : state) {
        benchmark::DoNotOptimize(log_negativity(V, Bipartition::AC));
    }
}
BENCHMARK(BM_pair_negativity_closed_form);

void BM_full_analysis(benchmark::State& state) {
    const Matrix6 V = solve_lyapunov(drift_matrix(base()), diffusion_matrix(base()));
    for (auto _ : state) {
        benchmark::DoNotOptimize(analyze(V, 157.0));
    }
}
BENCHMARK(BM_full_analysis);

void BM_run_point(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_point(base()));
    }
}
BENCHMARK(BM_run_point);

void BM_discrete_step_operator(benchmark::State& state) {
    const Matrix6 K = drift_matrix(base());
    const Matrix6 D = diffusion_matrix(base());
    const double dt = 0.02 / derive_rates(base()).kappa;
    for (auto _ : state) {
        benchmark::DoNotOptimize(discrete_step_operator(K, D, dt));
    }
}
BENCHMARK(BM_discrete_step_operator);

// cost of one Langevin step: matrix-vector update plus six fresh normals,
// the quantity that sets every ensemble runtime
void BM_langevin_step(benchmark::State& state) {
    const Matrix6 K = drift_matrix(base());
    const Matrix6 D = diffusion_matrix(base());
    const double dt = 0.02 / derive_rates(base()).kappa;
    const auto op = discrete_step_operator(K, D, dt);

    std::mt19937_64 gen(7);
    std::normal_distribution<double> nd(0.0, 1.0);
    Vector6 phi = Vector6::Zero();
    Vector6 xi;
    for (auto _ : state) {
        for (int i = 0; i < 6; ++i) xi(i) = nd(gen);
        phi = (op.phi * phi + op.noise_l * xi).eval();
        benchmark::DoNotOptimize(phi);
    }
}
BENCHMARK(BM_langevin_step);

void BM_small_sweep(benchmark::State& state) {
    SweepSpec spec;
    spec.name = "bench";
    spec.axes = {{"temperature", 1e-6, 1e-3, 16, true}};
    spec.fields = {"e_ac", "e_mc"};
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_sweep(base(), spec, 1));
    }
}
BENCHMARK(BM_small_sweep)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
