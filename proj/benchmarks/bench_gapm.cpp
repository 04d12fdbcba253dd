#include <benchmark/benchmark.h>

#include <random>

#include "gapm/cli/builders.hpp"
#include "gapm/engine.hpp"
#include "gapm/lp.hpp"
#include "gapm/refiners.hpp"

namespace {

gapm::StandardLp dense_lp(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    gapm::StandardLp lp;
    lp.cost.resize(n);
    for (auto& c : lp.cost) c = -u(rng);
    lp.matrix = gapm::Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) lp.matrix(i, j) = u(rng);
    }
    lp.rhs.assign(n, 1.0);
    lp.senses.assign(n, gapm::Sense::le);
    return lp;
}

void bm_lp_solve(benchmark::State& state) {
    const auto lp = dense_lp(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(gapm::solve(lp));
}
BENCHMARK(bm_lp_solve)->Arg(10)->Arg(40)->Arg(100);

void bm_capacity_run(benchmark::State& state) {
    const auto inst = gapm::cli::make_lands(gapm::cli::bundled_lands_data());
    const auto space = gapm::cli::make_space(inst);
    gapm::GapmConfig cfg;
    cfg.epsilon = 2e-6;
    for (auto _ : state) benchmark::DoNotOptimize(gapm::run(inst.model, *space, gapm::RangingRefiner{}, cfg));
}
BENCHMARK(bm_capacity_run)->Unit(benchmark::kMillisecond);

void bm_cvar_run(benchmark::State& state) {
    gapm::cli::CvarOptions opt;
    opt.pool_size = static_cast<std::size_t>(state.range(0));
    const auto inst = gapm::cli::make_cvar(opt);
    const auto space = gapm::cli::make_space(inst);
    gapm::GapmConfig cfg;
    cfg.epsilon = 5e-3;
    cfg.max_iterations = 15;
    for (auto _ : state) benchmark::DoNotOptimize(gapm::run(inst.model, *space, gapm::HyperplaneRefiner{}, cfg));
}
BENCHMARK(bm_cvar_run)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void bm_master_solve(benchmark::State& state) {
    const auto inst = gapm::cli::make_lands(gapm::cli::bundled_lands_data());
    const auto space = gapm::cli::make_space(inst);
    gapm::GapmConfig cfg;
    cfg.max_iterations = static_cast<std::size_t>(state.range(0));
    cfg.epsilon = 1e-12;
    const auto res = gapm::run(inst.model, *space, gapm::RangingRefiner{}, cfg);
    for (auto _ : state) benchmark::DoNotOptimize(gapm::solve_master(inst.model, res.partition));
    state.counters["cells"] = static_cast<double>(res.partition.size());
}
BENCHMARK(bm_master_solve)->Arg(1)->Arg(4)->Arg(6);

}  // namespace

BENCHMARK_MAIN();
