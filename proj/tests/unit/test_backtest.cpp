#include "curvehedge/backtest.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

using namespace curvehedge;

namespace {

BondCurve curve0() { return BondCurve::from_points(0.0, {{1.0, 0.97}, {1.5, 0.955}, {2.0, 0.94}, {2.5, 0.925}}); }

CurvePath one_path(const DiscreteMeasure& nu, std::size_t steps, double end = 1.0) {
    return simulate_forward_euler(forward_normalize(curve0(), nu), VolSurface::ho_lee({0.2}),
                                  TimeGrid::uniform(0.0, end, steps), SeedSpec{10}, 1)[0];
}

StrategyFunction fixed(const DiscreteMeasure& phi) {
    return [phi](const ForwardCurve&, std::size_t) {
        StrategyEstimate s;
        s.phi = phi;
        s.se.assign(phi.size(), 0.0);
        return s;
    };
}

}  // namespace

TEST(StrategyKind, NamesRoundTrip) {
    for (auto k : {StrategyKind::delta, StrategyKind::clark_ocone, StrategyKind::instrument}) {
        EXPECT_EQ(parse_strategy_kind(to_string(k)), k);
    }
    EXPECT_THROW(parse_strategy_kind("gamma"), std::invalid_argument);
}

TEST(Ledger, RebalanceDatesStopBeforeExercise) {
    const auto path = one_path(DiscreteMeasure::dirac(1.0), 10);
    const auto ledger = build_ledger(path, 1.0, StrategyKind::delta, fixed(DiscreteMeasure::dirac(2.0)), 3);
    EXPECT_EQ(ledger.steps, (std::vector<std::size_t>{0, 3, 6, 9}));
    EXPECT_EQ(ledger.horizon, 10u);
    EXPECT_THROW(build_ledger(path, 1.0, StrategyKind::delta, fixed(DiscreteMeasure::dirac(2.0)), 0),
                 std::invalid_argument);
}

TEST(Rollforward, BuyAndHoldReplicatesTheAsset) {
    const DiscreteMeasure mu({{2.0, 1.0}, {2.5, 0.5}});
    const auto path = one_path(DiscreteMeasure::dirac(1.0), 20);
    const auto ledger = build_ledger(path, 1.0, StrategyKind::clark_ocone, fixed(mu), 1);
    const double v0 = measure_pair(path.forward_curve(0), mu);
    const auto v = rollforward(path, ledger, v0);
    EXPECT_NEAR(v.back(), measure_pair(path.forward_curve(20), mu), 1e-14);
}

TEST(Rollforward, NumeraireHoldingIsConstant) {
    const DiscreteMeasure nu({{1.0, 0.5}, {1.5, 0.5}});
    const double c = 0.3;
    const auto path = one_path(nu, 20);
    const auto ledger = build_ledger(path, 1.0, StrategyKind::clark_ocone, fixed(nu.scaled(c)), 2);
    for (double v : rollforward(path, ledger, c)) EXPECT_NEAR(v, c, 1e-14);
    EXPECT_LE(self_financing_check(path, ledger).max_gap, 1e-14);
}

TEST(Rollforward, DateMismatchThrows) {
    const auto path = one_path(DiscreteMeasure::dirac(1.0), 10);
    auto ledger = build_ledger(path, 1.0, StrategyKind::delta, fixed(DiscreteMeasure::dirac(2.0)), 5);
    ledger.dates[1] = 0.55;
    EXPECT_THROW(rollforward(path, ledger, 0.0), std::invalid_argument);
    EXPECT_THROW(build_ledger(path, 0.55, StrategyKind::delta, fixed(DiscreteMeasure::dirac(2.0)), 1),
                 std::invalid_argument);
}

TEST(SelfFinancing, RebalancingWithinHoldingsIsGapFree) {
    // Delta hedge: rebalancing moves value between bonds, so rolled and
    // marked values differ only by the discretization of the hedge.
    const auto spec = InstrumentSpec::bond_call(1.0, 2.0, 0.97);
    const auto path = one_path(spec.nu, 50);
    const auto model = effective_vol(VolSurface::ho_lee({0.2}), spec);
    const auto ledger = build_ledger(path, 1.0, StrategyKind::delta, delta_strategy_function(spec, model), 1);
    const auto sf = self_financing_check(path, ledger);
    EXPECT_EQ(sf.gaps.front(), 0.0);
    EXPECT_LT(sf.max_gap, 0.05);
}

TEST(Replication, ZeroVolWorldHasNoError) {
    const auto spec = InstrumentSpec::bond_call(1.0, 2.0, 0.95);
    const auto start = forward_normalize(curve0(), spec.nu);
    for (auto kind : {StrategyKind::delta, StrategyKind::clark_ocone, StrategyKind::instrument}) {
        ReplicationConfig cfg;
        cfg.kind = kind;
        cfg.paths = 8;
        cfg.steps = {4, 8};
        cfg.inner.inner_paths = 1000;
        const auto report = replication_report(start, spec, VolSurface::zero(), cfg);
        for (const auto& row : report.rows) {
            EXPECT_EQ(row.mean, 0.0) << to_string(kind);
            EXPECT_EQ(row.max_abs, 0.0) << to_string(kind);
        }
    }
}

TEST(Replication, GbmWorldNeedsSingleAtoms) {
    const auto tenor = TenorStructure::make({1.0, 1.5, 2.0}, 1.0, 1.0);
    const auto spec = InstrumentSpec::swaption(tenor, 0.03);
    ReplicationConfig cfg;
    cfg.world = BacktestWorld::gbm;
    cfg.paths = 4;
    cfg.steps = {4};
    EXPECT_THROW(replication_report(forward_normalize(curve0(), spec.nu), spec, VolSurface::ho_lee({0.01}), cfg),
                 std::invalid_argument);
}

TEST(Replication, DeltaHedgeInGbmWorldIsUnbiased) {
    const auto spec = InstrumentSpec::bond_call(1.0, 2.0, 0.97);
    ReplicationConfig cfg;
    cfg.world = BacktestWorld::gbm;
    cfg.paths = 2000;
    cfg.steps = {10, 40};
    cfg.seeds = SeedSpec{3};
    const auto report = replication_report(forward_normalize(curve0(), spec.nu), spec, VolSurface::ho_lee({0.2}), cfg);
    ASSERT_EQ(report.rows.size(), 2u);
    for (const auto& row : report.rows) EXPECT_LT(std::abs(row.mean), 3.0 * row.se);
    EXPECT_LT(report.rows[1].sd, report.rows[0].sd);
}
