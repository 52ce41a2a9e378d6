#include "curvehedge/simulation.hpp"
#include "curvehedge/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace curvehedge;

namespace {

BondCurve curve0() {
    return BondCurve::from_points(0.0, {{0.5, 0.985}, {1.0, 0.97}, {1.5, 0.955}, {2.0, 0.94}, {3.0, 0.91}});
}

}  // namespace

TEST(VolSurface, FamiliesEvaluate) {
    EXPECT_DOUBLE_EQ(VolSurface::ho_lee({0.01})(0.5, 2.0)[0], -0.015);
    const double v = VolSurface::vasicek({0.02}, {0.5})(0.0, 1.0)[0];
    EXPECT_NEAR(v, -(0.02 / 0.5) * (1.0 - std::exp(-0.5)), 1e-15);
    const auto pw = VolSurface::piecewise({1.0, 2.0}, {{0.1}, {0.3}});
    EXPECT_DOUBLE_EQ(pw(0.0, 0.7)[0], 0.1);
    EXPECT_DOUBLE_EQ(pw(0.0, 1.5)[0], 0.3);
    EXPECT_EQ(VolSurface::constant({0.1, 0.2}).factors(), 2u);
    EXPECT_EQ(parse_vol_family("ho-lee"), VolFamily::ho_lee);
    EXPECT_THROW(parse_vol_family("sabr"), std::invalid_argument);
}

TEST(VolSurface, BoundednessCheck) {
    const std::vector<double> t{0.0, 1.0};
    const std::vector<double> y{1.0, 2.0};
    EXPECT_NO_THROW(VolSurface::ho_lee({0.01}).check_bounded(t, y));
    EXPECT_THROW(VolSurface::constant({std::numeric_limits<double>::infinity()}).check_bounded(t, y),
                 std::domain_error);
}

TEST(TimeGrid, ThroughHasExerciseNode) {
    const auto g = TimeGrid::through(0.0, 1.0, 1.5, 10);
    EXPECT_EQ(g.index_of(1.0), 10u);
    EXPECT_NEAR(g.end(), 1.5, 1e-12);
    EXPECT_THROW(g.index_of(0.33), std::invalid_argument);
    EXPECT_THROW(TimeGrid({0.0, 0.0}), std::invalid_argument);
}

TEST(DiscountedSimulator, ZeroVolKeepsCurveConstant) {
    const auto grid = TimeGrid::uniform(0.0, 1.0, 20);
    const auto paths = simulate_discounted_exact(curve0(), VolSurface::zero(2), grid, SeedSpec{11}, 16);
    for (const auto& p : paths) {
        for (std::size_t l = 0; l <= p.steps(); ++l) {
            for (std::size_t k = 0; k < p.nodes(); ++k) EXPECT_EQ(p.value(l, k), p.value(0, k));
        }
        EXPECT_EQ(rn_weight(p, DiscreteMeasure::dirac(1.0)), 1.0);
    }
}

TEST(DiscountedSimulator, ReweightMeanIsOne) {
    const auto grid = TimeGrid::uniform(0.0, 1.0, 10);
    const DiscreteMeasure nu({{1.5, 0.5}, {2.0, 0.5}});
    const auto paths = simulate_discounted_exact(curve0(), VolSurface::ho_lee({0.02}), grid, SeedSpec{5}, 20000);
    RunningStats w;
    for (const auto& p : paths) w.add(rn_weight(p, nu));
    EXPECT_LT(std::abs(w.mean - 1.0), 4.0 * w.se());
    EXPECT_GT(w.se(), 0.0);
}

TEST(DiscountedSimulator, NonpositiveNumeraireThrows) {
    const auto grid = TimeGrid::uniform(0.0, 1.0, 2);
    const auto paths = simulate_discounted_exact(curve0(), VolSurface::zero(), grid, SeedSpec{1}, 1);
    EXPECT_THROW(rn_weight(paths[0], DiscreteMeasure({{1.0, 1.0}, {2.0, -5.0}})), std::domain_error);
}

TEST(GirsanovDrift, ZeroVolIsZero) {
    const auto fwd = forward_normalize(curve0(), DiscreteMeasure::dirac(1.0));
    for (double d : girsanov_drift(fwd, VolSurface::zero(3), 0.2)) EXPECT_EQ(d, 0.0);
}

TEST(GirsanovDrift, SingleAtomIsZetaAtT) {
    const auto vol = VolSurface::ho_lee({0.01, 0.03});
    const auto fwd = forward_normalize(curve0(), DiscreteMeasure::dirac(2.0));
    const auto d = girsanov_drift(fwd, vol, 0.25);
    const auto z = vol(0.25, 2.0);
    EXPECT_DOUBLE_EQ(d[0], z[0]);
    EXPECT_DOUBLE_EQ(d[1], z[1]);
}

TEST(GirsanovDrift, TwoAtomMatchesBruteForceSum) {
    const double beta = 0.01;
    const DiscreteMeasure nu({{1.5, 0.5}, {2.0, 0.5}});
    const ForwardCurve fwd(0.0, nu, {1.5, 2.0}, {1.0157068062827226, 0.9842931937172775});
    double brute = 0.0;
    brute += 0.5 * 1.0157068062827226 * (-beta * 1.5);
    brute += 0.5 * 0.9842931937172775 * (-beta * 2.0);
    const auto d = girsanov_drift(fwd, VolSurface::ho_lee({beta}), 0.0);
    EXPECT_NEAR(d[0], brute, 1e-15);
    EXPECT_NEAR(d[0], -0.0174607, 1e-7);
}

TEST(ForwardEuler, SingleAtomNumeraireStaysOne) {
    const auto start = forward_normalize(curve0(), DiscreteMeasure::dirac(1.5));
    const auto grid = TimeGrid::uniform(0.0, 1.0, 25);
    const auto paths = simulate_forward_euler(start, VolSurface::ho_lee({0.05, 0.02}), grid, SeedSpec{3}, 50);
    const std::size_t node = start.index_of(1.5);
    for (const auto& p : paths) {
        for (std::size_t l = 0; l <= p.steps(); ++l) EXPECT_EQ(p.value(l, node), 1.0);
    }
}

TEST(ForwardEuler, MaturityConstantVolFreezesCurve) {
    const DiscreteMeasure nu({{1.0, 0.3}, {2.0, 0.7}});
    const auto start = forward_normalize(curve0(), nu);
    const auto grid = TimeGrid::uniform(0.0, 1.0, 25);
    const auto paths = simulate_forward_euler(start, VolSurface::constant({0.2, 0.1}), grid, SeedSpec{4}, 20);
    for (const auto& p : paths) {
        for (std::size_t k = 0; k < p.nodes(); ++k) EXPECT_NEAR(p.value(p.steps(), k), start.values()[k], 1e-15);
    }
}

TEST(ForwardEuler, NormalizationHoldsOnEveryNode) {
    const DiscreteMeasure nu({{1.0, 0.5}, {1.5, 0.25}, {3.0, 0.25}});
    const auto start = forward_normalize(curve0(), nu);
    const auto grid = TimeGrid::uniform(0.0, 1.0, 50);
    const auto paths = simulate_forward_euler(start, VolSurface::ho_lee({0.3, 0.1}), grid, SeedSpec{6}, 100);
    for (const auto& p : paths) {
        for (std::size_t l = 0; l <= p.steps(); ++l) EXPECT_LE(p.forward_curve(l).normalization_error(), 1e-12);
    }
}

TEST(ForwardEuler, ThreadCountDoesNotChangePaths) {
    const auto start = forward_normalize(curve0(), DiscreteMeasure::dirac(1.0));
    const auto grid = TimeGrid::uniform(0.0, 1.0, 8);
    const auto vol = VolSurface::vasicek({0.02}, {0.3});
    const auto a = simulate_forward_euler(start, vol, grid, SeedSpec{77}, 700, 1);
    const auto b = simulate_forward_euler(start, vol, grid, SeedSpec{77}, 700, 4);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].values, b[i].values);
        EXPECT_EQ(a[i].increments, b[i].increments);
    }
}

TEST(ForwardEuler, TerminalMatchesEvolve) {
    const auto start = forward_normalize(curve0(), DiscreteMeasure::dirac(1.0));
    const ForwardEulerSimulator sim(start, VolSurface::ho_lee({0.1}), TimeGrid::uniform(0.0, 1.0, 12));
    auto rng = SeedSpec{9}.stream(0);
    std::vector<double> dw(12);
    sim.draw_increments(rng, dw);
    CurvePath path;
    sim.evolve(dw, path);
    std::vector<double> end(start.size());
    sim.terminal(dw, end);
    for (std::size_t k = 0; k < end.size(); ++k) EXPECT_EQ(end[k], path.value(12, k));
}

TEST(CurvePath, RiskNeutralPathHasNoForwardState) {
    const auto paths = simulate_discounted_exact(curve0(), VolSurface::zero(), TimeGrid::uniform(0.0, 1.0, 2),
                                                 SeedSpec{1}, 1);
    EXPECT_THROW(paths[0].forward_curve(0), std::logic_error);
}

TEST(AggregateIncrements, SumsGroups) {
    const std::vector<double> fine{1, 2, 3, 4, 5, 6, 7, 8};
    const auto coarse = aggregate_increments(fine, 2, 2);
    ASSERT_EQ(coarse.size(), 4u);
    EXPECT_EQ(coarse[0], 4.0);
    EXPECT_EQ(coarse[1], 6.0);
    EXPECT_EQ(coarse[2], 12.0);
    EXPECT_EQ(coarse[3], 14.0);
    EXPECT_THROW(aggregate_increments(fine, 2, 3), std::invalid_argument);
}

TEST(Stats, MergeMatchesSinglePass) {
    RunningStats all, left, right;
    for (int i = 0; i < 100; ++i) {
        const double x = std::sin(i * 0.37) * 3.0 + 1.0;
        all.add(x);
        (i < 37 ? left : right).add(x);
    }
    left.merge(right);
    EXPECT_NEAR(left.mean, all.mean, 1e-14);
    EXPECT_NEAR(left.variance(), all.variance(), 1e-12);
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> y{3, 5, 7, 9};
    EXPECT_NEAR(regression_slope(x, y), 2.0, 1e-14);
}

TEST(Simulation, ZeroPathsRejected) {
    const auto grid = TimeGrid::uniform(0.0, 1.0, 2);
    EXPECT_THROW(simulate_discounted_exact(curve0(), VolSurface::zero(), grid, SeedSpec{1}, 0), std::invalid_argument);
    EXPECT_THROW(TimeGrid(std::vector<double>{}), std::invalid_argument);
}
