#include <benchmark/benchmark.h>

#include <sstream>

#include "raingen/arma.hpp"
#include "raingen/scenario.hpp"

using namespace raingen;

namespace {

std::vector<double> ar1_record(std::size_t n) {
    ArmaModel m;
    m.p = 1;
    m.ar_coeffs = {0.4};
    m.mean = 450.0;
    m.noise_variance = 80.0 * 80.0;
    Rng rng(3);
    return simulate(m, n, rng);
}

Provenance provenance() {
    Provenance p;
    p.bands.normal_lower = 300.0;
    p.bands.normal_limit = 450.0;
    p.bands.normal_upper = 600.0;
    p.bands.wet_split = 750.0;
    p.bands.observed_max = 900.0;
    p.model.p = 1;
    p.model.ar_coeffs = {0.4};
    p.model.mean = 450.0;
    p.model.noise_variance = 6400.0;
    p.seasonality.factors.fill(1.0 / 12.0);
    p.frequencies.total = 40;
    p.frequencies.counts = {4, 2, 14, 14, 4, 2};
    return p;
}

void BM_FitArma(benchmark::State& state) {
    const auto x = ar1_record(static_cast<std::size_t>(state.range(0)));
    const auto p = static_cast<std::size_t>(state.range(1));
    const auto q = static_cast<std::size_t>(state.range(2));
    for (auto _ : state) benchmark::DoNotOptimize(fit_arma(x, p, q));
}
BENCHMARK(BM_FitArma)->Args({40, 1, 0})->Args({40, 2, 1})->Args({500, 1, 0})->Args({500, 2, 2});

void BM_SelectOrder(benchmark::State& state) {
    const auto x = ar1_record(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(select_order(x));
}
BENCHMARK(BM_SelectOrder)->Arg(40)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_GenerateEnsemble(benchmark::State& state) {
    const auto p = provenance();
    const auto k = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(generate_ensemble(p, k, 100, 1));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(k) * 100);
}
BENCHMARK(BM_GenerateEnsemble)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_WriteMonthlyCsv(benchmark::State& state) {
    const auto e = generate_ensemble(provenance(), 100, 100, 1);
    for (auto _ : state) {
        std::ostringstream out;
        write_ensemble_monthly_csv(out, e);
        benchmark::DoNotOptimize(out.str().size());
    }
}
BENCHMARK(BM_WriteMonthlyCsv)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
