#include "curvehedge/simulation.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace curvehedge;

namespace {

BondCurve curve0() {
    return BondCurve::from_points(0.0, {{0.5, 0.985}, {1.0, 0.97}, {1.5, 0.955}, {2.0, 0.94}, {2.5, 0.926}, {3.0, 0.914}});
}

const DiscreteMeasure kAnnuity({{1.5, 0.5}, {2.0, 0.5}, {2.5, 0.5}, {3.0, 0.5}});

}  // namespace

static void BM_ForwardEulerPath(benchmark::State& state) {
    const auto steps = static_cast<std::size_t>(state.range(0));
    const ForwardEulerSimulator sim(forward_normalize(curve0(), kAnnuity), VolSurface::ho_lee({0.15, 0.05}),
                                    TimeGrid::uniform(0.0, 1.0, steps));
    CurvePath path;
    std::uint64_t p = 0;
    for ([[maybe_unused]] auto _ : state) {
        sim.simulate(p++, SeedSpec{1}, path);
        benchmark::DoNotOptimize(path.values.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(steps));
}

static void BM_ForwardEulerTerminal(benchmark::State& state) {
    const auto steps = static_cast<std::size_t>(state.range(0));
    const ForwardEulerSimulator sim(forward_normalize(curve0(), kAnnuity), VolSurface::ho_lee({0.15, 0.05}),
                                    TimeGrid::uniform(0.0, 1.0, steps));
    std::vector<double> dw(steps * 2), end(sim.nodes());
    auto rng = SeedSpec{2}.stream(0);
    sim.draw_increments(rng, dw);
    for ([[maybe_unused]] auto _ : state) {
        sim.terminal(dw, end);
        benchmark::DoNotOptimize(end.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(steps));
}

static void BM_DiscountedExactPath(benchmark::State& state) {
    const auto steps = static_cast<std::size_t>(state.range(0));
    const DiscountedSimulator sim(curve0(), VolSurface::vasicek({0.02, 0.01}, {0.5, 1.5}),
                                  TimeGrid::uniform(0.0, 1.0, steps));
    CurvePath path;
    std::uint64_t p = 0;
    for ([[maybe_unused]] auto _ : state) {
        sim.simulate(p++, SeedSpec{3}, path);
        benchmark::DoNotOptimize(path.values.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(steps));
}

static void BM_StepVolTable(benchmark::State& state) {
    const auto c = curve0();
    const auto vol = VolSurface::vasicek({0.02, 0.01}, {0.5, 1.5});
    const auto grid = TimeGrid::uniform(0.0, 1.0, 200);
    for ([[maybe_unused]] auto _ : state) {
        StepVolTable table(vol, grid, c.maturities());
        benchmark::DoNotOptimize(table.half_variance(0, 0));
    }
}

BENCHMARK(BM_ForwardEulerPath)->Arg(25)->Arg(200);
BENCHMARK(BM_ForwardEulerTerminal)->Arg(1)->Arg(20)->Arg(200);
BENCHMARK(BM_DiscountedExactPath)->Arg(25)->Arg(200);
BENCHMARK(BM_StepVolTable);
