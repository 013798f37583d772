// Serial reference loops against their OpenMP versions.
#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "prethermal/coupling.hpp"
#include "prethermal/exact.hpp"
#include "prethermal/kernels.hpp"

using namespace prethermal;
using kernels::cplx;

namespace {

const Eigen::MatrixXd& couplings(int n) {
    static std::map<int, Eigen::MatrixXd> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, power_law_couplings(n, 1.0, 0.55).j_script).first;
    return it->second;
}

std::vector<cplx> random_state(std::size_t dim) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::vector<cplx> v(dim);
    for (auto& x : v) x = {g(rng), g(rng)};
    return v;
}

template <bool Parallel>
void matvec(benchmark::State& state) {
    const auto h = kernels::serial::full_ising_matrix(couplings(static_cast<int>(state.range(0))), 10.0);
    const auto x = random_state(h.rows);
    std::vector<cplx> y(h.rows);
    for (auto _ : state) {
        if constexpr (Parallel)
            kernels::matvec(h, x, y);
        else
            kernels::serial::matvec(h, x, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * h.nnz()));
}

template <bool Parallel>
void build(benchmark::State& state) {
    const auto& j = couplings(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto h = Parallel ? kernels::full_ising_matrix(j, 10.0) : kernels::serial::full_ising_matrix(j, 10.0);
        benchmark::DoNotOptimize(h.val.data());
    }
}

template <bool Parallel>
void magnetization(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::vector<std::uint64_t> basis(std::size_t{1} << n);
    std::vector<double> prob(basis.size(), 1.0 / static_cast<double>(basis.size()));
    for (std::size_t s = 0; s < basis.size(); ++s) basis[s] = s;
    for (auto _ : state) {
        auto m = Parallel ? kernels::site_magnetization(basis, prob, n)
                          : kernels::serial::site_magnetization(basis, prob, n);
        benchmark::DoNotOptimize(m.data());
    }
}

void krylov_step(benchmark::State& state) {
    const auto h = build_full_ising(power_law_couplings(static_cast<int>(state.range(0)), 1.0, 0.55), 10.0,
                                    static_cast<int>(state.range(0)));
    Eigen::VectorXcd psi = initial_state(h, ExcitationPattern(h.n_sites, {1}));
    for (auto _ : state) {
        krylov_propagate(h.matrix, psi, 0.05);
        benchmark::DoNotOptimize(psi.data());
    }
}

}  // namespace

BENCHMARK(matvec<false>)->Name("matvec/serial")->DenseRange(12, 18, 3);
BENCHMARK(matvec<true>)->Name("matvec/openmp")->DenseRange(12, 18, 3);
BENCHMARK(build<false>)->Name("full_ising/serial")->DenseRange(12, 16, 2);
BENCHMARK(build<true>)->Name("full_ising/openmp")->DenseRange(12, 16, 2);
BENCHMARK(magnetization<false>)->Name("magnetization/serial")->DenseRange(14, 20, 3);
BENCHMARK(magnetization<true>)->Name("magnetization/openmp")->DenseRange(14, 20, 3);
BENCHMARK(krylov_step)->DenseRange(10, 16, 3);

BENCHMARK_MAIN();
