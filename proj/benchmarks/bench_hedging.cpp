#include "curvehedge/analytic.hpp"
#include "curvehedge/hedging.hpp"
#include "curvehedge/malliavin.hpp"

#include <benchmark/benchmark.h>

#include <limits>

using namespace curvehedge;

namespace {

BondCurve curve0() {
    return BondCurve::from_points(0.0, {{1.0, 0.97}, {1.5, 0.955}, {2.0, 0.94}, {2.5, 0.926}, {3.0, 0.914}});
}

}  // namespace

static void BM_PhiTerms(benchmark::State& state) {
    double x = 0.9;
    for ([[maybe_unused]] auto _ : state) {
        benchmark::DoNotOptimize(phi_terms(1.0, x, 0.2));
        x += 1e-9;
    }
}

static void BM_DeltaSwaption(benchmark::State& state) {
    const auto spec = InstrumentSpec::swaption(TenorStructure::make({1.0, 1.5, 2.0, 2.5, 3.0}, 1.0, 1.0), 0.03);
    const auto c = curve0();
    const auto model = effective_vol(VolSurface::ho_lee({0.15, 0.05}), spec, &c);
    const auto fwd = forward_normalize(c, spec.nu);
    for ([[maybe_unused]] auto _ : state) benchmark::DoNotOptimize(delta_strategy(fwd, spec, model).eta);
}

static void BM_ClarkOconeBondCall(benchmark::State& state) {
    const auto spec = InstrumentSpec::bond_call(1.0, 2.0, 0.97);
    const auto fwd = forward_normalize(curve0(), spec.nu);
    NestedMcConfig cfg;
    cfg.inner_paths = static_cast<std::size_t>(state.range(0));
    cfg.max_inner_dt = std::numeric_limits<double>::infinity();
    for ([[maybe_unused]] auto _ : state) {
        benchmark::DoNotOptimize(clark_ocone_strategy(fwd, spec, VolSurface::ho_lee({0.2}), cfg, SeedSpec{1}).value);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

static void BM_ClarkOconeMomentsSwaption(benchmark::State& state) {
    const auto spec = InstrumentSpec::swaption(TenorStructure::make({1.0, 1.5, 2.0, 2.5, 3.0}, 1.0, 1.0), 0.03);
    const auto fwd = forward_normalize(curve0(), spec.nu);
    NestedMcConfig cfg;
    cfg.inner_paths = 10000;
    for ([[maybe_unused]] auto _ : state) {
        benchmark::DoNotOptimize(
            clark_ocone_moments(fwd, spec, VolSurface::ho_lee({0.15, 0.05}), cfg, SeedSpec{1}, true).value);
    }
}

BENCHMARK(BM_PhiTerms);
BENCHMARK(BM_DeltaSwaption);
BENCHMARK(BM_ClarkOconeBondCall)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ClarkOconeMomentsSwaption)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
