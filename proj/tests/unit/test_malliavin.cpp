#include "curvehedge/malliavin.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

using namespace curvehedge;

namespace {

BondCurve curve0() { return BondCurve::from_points(0.0, {{1.0, 0.97}, {1.5, 0.955}, {2.0, 0.94}, {2.5, 0.925}}); }

}  // namespace

TEST(SigmaHat, SingleAtomNumeraireAtItsMaturity) {
    const auto fwd = forward_normalize(curve0(), DiscreteMeasure::dirac(1.5));
    for (double s : sigma_hat_field(fwd, VolSurface::ho_lee({0.02, 0.01}), 0.3, 1.5)) EXPECT_EQ(s, 0.0);
}

TEST(SigmaHat, MaturityConstantVol) {
    const auto fwd = forward_normalize(curve0(), DiscreteMeasure({{1.0, 0.5}, {2.0, 0.5}}));
    for (double y : {1.0, 1.5, 2.0, 2.5}) {
        for (double s : sigma_hat_field(fwd, VolSurface::constant({0.2, 0.4}), 0.0, y)) EXPECT_EQ(s, 0.0);
    }
}

TEST(SigmaHat, TwoAtomMatchesBruteForce) {
    const double beta = 0.01;
    const DiscreteMeasure nu({{1.5, 0.5}, {2.0, 0.5}});
    const auto fwd = forward_normalize(curve0(), nu);
    const double y = 1.0;
    const double zy = -beta * y;
    double sum = 0.0;
    sum += 0.5 * fwd.at(1.5) * (zy - (-beta * 1.5));
    sum += 0.5 * fwd.at(2.0) * (zy - (-beta * 2.0));
    const double brute = fwd.at(y) * sum;
    EXPECT_NEAR(sigma_hat_field(fwd, VolSurface::ho_lee({beta}), 0.0, y)[0], brute, 1e-15);
}

TEST(SigmaHat, UnknownMaturityThrows) {
    const auto fwd = forward_normalize(curve0(), DiscreteMeasure::dirac(1.0));
    EXPECT_THROW(sigma_hat_field(fwd, VolSurface::ho_lee({0.01}), 0.0, 3.0), LookupError);
}

TEST(MalliavinDerivative, RequiresTBeforeU) {
    const auto fwd = forward_normalize(curve0(), DiscreteMeasure::dirac(1.0));
    EXPECT_THROW(malliavin_derivative(fwd, VolSurface::ho_lee({0.01}), 0.5, 2.0), std::invalid_argument);
    EXPECT_NO_THROW(malliavin_derivative(fwd, VolSurface::ho_lee({0.01}), 0.0, 2.0));
}

TEST(MalliavinDerivative, BumpCheckImprovesUnderRefinement) {
    const auto vol = VolSurface::vasicek({0.02, 0.01}, {0.5, 1.5});
    const DiscreteMeasure nu = DiscreteMeasure::dirac(1.0);
    double previous = 1.0;
    for (std::size_t steps : {50u, 200u}) {
        const DiscountedSimulator sim(curve0(), vol, TimeGrid::uniform(0.0, 1.0, steps));
        std::vector<double> dw(steps * 2);
        auto rng = SeedSpec{42}.stream(0);
        sim.draw_increments(rng, dw);
        const auto r = bump_check(sim, dw, nu, vol, steps / 2, 0, 2.5);
        EXPECT_LE(r.relative_error, 1e-2);
        EXPECT_LT(r.relative_error, previous);
        previous = r.relative_error;
    }
}

TEST(Alpha, FromPortfolioIsLinear) {
    const auto fwd = forward_normalize(curve0(), DiscreteMeasure::dirac(1.0));
    const auto vol = VolSurface::ho_lee({0.1});
    const DiscreteMeasure phi({{2.0, 2.0}, {2.5, -1.0}});
    const auto a = alpha_from_portfolio(fwd, vol, phi);
    const double expected = 2.0 * sigma_hat_field(fwd, vol, 0.0, 2.0)[0] - sigma_hat_field(fwd, vol, 0.0, 2.5)[0];
    EXPECT_NEAR(a[0], expected, 1e-16);
}

TEST(Alpha, ConstantClaimHasNullIntegrand) {
    const DiscreteMeasure nu = DiscreteMeasure::dirac(1.0);
    const auto spec = InstrumentSpec::generic(DiscreteMeasure::dirac(2.0), nu, 1.0, 1.0, Payoff::constant(0.8));
    const auto vol = VolSurface::ho_lee({0.2});
    const auto paths = simulate_forward_euler(forward_normalize(curve0(), nu), vol, TimeGrid::uniform(0.0, 1.0, 4),
                                              SeedSpec{2}, 1);
    NestedMcConfig cfg;
    cfg.inner_paths = 2000;
    cfg.max_inner_dt = 0.25;
    const auto alpha = alpha_process(paths[0], spec, vol, cfg, SeedSpec{3});
    ASSERT_EQ(alpha.dates.size(), 4u);
    for (std::size_t l = 0; l < alpha.dates.size(); ++l) {
        EXPECT_LE(std::abs(alpha.values[l][0]), 3.0 * alpha.se[l][0] + 1e-15) << l;
    }
}

TEST(Alpha, ThirdTermVanishesNearExercise) {
    // Needs a multi-atom nu: with nu = delta_T the term is identically zero.
    const DiscreteMeasure nu({{1.0, 0.5}, {1.5, 0.5}});
    const auto spec = InstrumentSpec::generic(DiscreteMeasure::dirac(2.5), nu, 1.0, 1.0, Payoff::call(0.95));
    const auto vol = VolSurface::ho_lee({0.2});
    NestedMcConfig cfg;
    cfg.inner_paths = 4000;
    const auto early = forward_normalize(curve0(), nu);
    const auto late = ForwardCurve(0.95, early.numeraire(), {early.maturities().begin(), early.maturities().end()},
                                   {early.values().begin(), early.values().end()});
    const auto m0 = clark_ocone_moments(early, spec, vol, cfg, SeedSpec{1}, true);
    const auto m1 = clark_ocone_moments(late, spec, vol, cfg, SeedSpec{1}, true);
    EXPECT_GT(std::abs(m0.alpha_terms[2][0]), 3.0 * m0.alpha_terms_se[2][0]);
    EXPECT_LT(std::abs(m1.alpha_terms[2][0]), std::abs(m0.alpha_terms[2][0]));
}

TEST(Residual, ZeroVolIsExactlyZero) {
    const auto spec = InstrumentSpec::bond_call(1.0, 2.0, 0.95);
    const auto vol = VolSurface::zero();
    const auto start = forward_normalize(curve0(), spec.nu);
    const double price = spec.payoff()(start.at(2.0));
    NestedMcConfig inner;
    inner.inner_paths = 1000;
    ResidualConfig cfg;
    cfg.paths = 20;
    cfg.steps = {4, 8};
    const auto r = co_representation_residual(start, spec, vol, price, nested_alpha_evaluator(spec, vol, inner, {}), cfg);
    for (const auto& row : r.rows) {
        EXPECT_EQ(row.mean, 0.0);
        EXPECT_EQ(row.sd, 0.0);
    }
    EXPECT_TRUE(std::isnan(r.slope));
}

TEST(Residual, MaturityConstantVolIsExactlyZero) {
    const auto spec = InstrumentSpec::bond_call(1.0, 2.0, 0.95);
    const auto vol = VolSurface::constant({0.3});
    const auto start = forward_normalize(curve0(), spec.nu);
    const double price = spec.payoff()(start.at(2.0));
    NestedMcConfig inner;
    inner.inner_paths = 1000;
    ResidualConfig cfg;
    cfg.paths = 20;
    cfg.steps = {4};
    const auto r = co_representation_residual(start, spec, vol, price, nested_alpha_evaluator(spec, vol, inner, {}), cfg);
    EXPECT_LE(std::abs(r.rows[0].mean), 1e-15);
    EXPECT_LE(r.rows[0].sd, 1e-15);
}

TEST(Residual, LinearClaimSdDecaysAtHalfOrder) {
    const DiscreteMeasure nu = DiscreteMeasure::dirac(1.0);
    const auto spec = InstrumentSpec::generic(DiscreteMeasure::dirac(2.5), nu, 1.0, 1.0, Payoff::linear());
    const auto vol = VolSurface::ho_lee({0.3});
    const auto start = forward_normalize(curve0(), nu);
    // For g(x) = x the integrand is sigma^(P^_t, 2.5) exactly.
    AlphaEvaluator exact = [&](const ForwardCurve& state, std::size_t, std::size_t, std::span<double> out) {
        out[0] = sigma_hat_field(state, vol, state.time(), 2.5)[0];
    };
    ResidualConfig cfg;
    cfg.paths = 4000;
    cfg.steps = {8, 16, 32, 64};
    cfg.seeds = SeedSpec{17};
    const auto r = co_representation_residual(start, spec, vol, start.at(2.5), exact, cfg);
    for (const auto& row : r.rows) EXPECT_LT(std::abs(row.mean), 3.0 * row.se + 1e-15);
    EXPECT_GT(r.slope, 0.35);
    EXPECT_LT(r.slope, 0.65);
}
