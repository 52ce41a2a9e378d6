#include "curvehedge/market_model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <string>

using namespace curvehedge;

namespace {

BondCurve sample_curve() { return BondCurve::from_points(0.0, {{1.0, 0.97}, {1.5, 0.955}, {2.0, 0.94}}); }

}  // namespace

TEST(MeasurePair, LinearCombination) {
    const auto curve = BondCurve::from_points(0.0, {{1.5, 0.96}, {2.0, 0.93}});
    const DiscreteMeasure m({{1.5, 1.0}, {2.0, -1.0}});
    EXPECT_NEAR(measure_pair(curve, m), 0.03, 1e-15);
}

TEST(MeasurePair, ZeroWeights) {
    const DiscreteMeasure m({{1.0, 0.0}, {2.0, 0.0}});
    EXPECT_EQ(measure_pair(sample_curve(), m), 0.0);
}

TEST(MeasurePair, OwnNumeraireIsOne) {
    const DiscreteMeasure nu({{1.0, 0.25}, {1.5, 0.25}, {2.0, 0.5}});
    const auto fwd = forward_normalize(sample_curve(), nu);
    EXPECT_NEAR(measure_pair(fwd, nu), 1.0, 1e-12);
}

TEST(MeasurePair, MissingMaturityNamesIt) {
    const DiscreteMeasure m = DiscreteMeasure::dirac(3.0);
    try {
        measure_pair(sample_curve(), m);
        FAIL() << "expected LookupError";
    } catch (const LookupError& e) {
        EXPECT_DOUBLE_EQ(e.maturity(), 3.0);
        EXPECT_NE(std::string(e.what()).find('3'), std::string::npos);
    }
}

TEST(DiscreteMeasure, MergesCloseAtomsAndSorts) {
    const DiscreteMeasure m({{2.0, 1.0}, {1.0, 0.5}, {2.0 + 1e-12, 0.25}});
    ASSERT_EQ(m.size(), 2u);
    EXPECT_DOUBLE_EQ(m.atoms()[0].maturity, 1.0);
    EXPECT_DOUBLE_EQ(m.weight_at(2.0), 1.25);
    EXPECT_EQ(m.weight_at(5.0), 0.0);
    const auto diff = m - m;
    for (const auto& a : diff.atoms()) EXPECT_EQ(a.weight, 0.0);
}

TEST(ForwardNormalize, SingleAtomNumeraire) {
    const auto fwd = forward_normalize(sample_curve(), DiscreteMeasure::dirac(1.5));
    EXPECT_DOUBLE_EQ(fwd.at(1.5), 1.0);
    EXPECT_DOUBLE_EQ(fwd.at(2.0), 0.94 / 0.955);
    EXPECT_DOUBLE_EQ(fwd.at(1.0), 0.97 / 0.955);
}

TEST(ForwardNormalize, TwoAtomNumeraire) {
    const auto curve = BondCurve::from_points(0.0, {{1.0, 0.97}, {2.0, 0.94}});
    const auto fwd = forward_normalize(curve, DiscreteMeasure({{1.0, 0.5}, {2.0, 0.5}}));
    EXPECT_NEAR(fwd.at(1.0), 1.0157068062827226, 1e-12);
    EXPECT_NEAR(fwd.at(2.0), 0.9842931937172775, 1e-12);
    EXPECT_LE(fwd.normalization_error(), kNormalizationTolerance);
}

TEST(ForwardNormalize, NonpositiveNumeraireThrows) {
    const auto curve = BondCurve::from_points(0.0, {{1.0, 0.97}, {2.0, 0.94}});
    EXPECT_THROW(forward_normalize(curve, DiscreteMeasure({{1.0, 1.0}, {2.0, -2.0}})), std::domain_error);
}

TEST(ForwardCurve, RejectsBrokenNormalization) {
    EXPECT_THROW(ForwardCurve(0.0, DiscreteMeasure::dirac(1.0), {1.0, 2.0}, {1.01, 0.9}), std::domain_error);
}

TEST(ForwardNormalize, RenormalizingIsIdentity) {
    const DiscreteMeasure nu = DiscreteMeasure::dirac(2.0);
    const auto fwd = forward_normalize(sample_curve(), nu);
    const auto again = forward_normalize(fwd, nu);
    for (std::size_t k = 0; k < fwd.size(); ++k) EXPECT_EQ(fwd.values()[k], again.values()[k]);
}

TEST(LiborRate, DirectEvaluation) {
    const auto curve = BondCurve::from_points(0.0, {{1.0, 0.98}, {1.5, 0.94}});
    EXPECT_NEAR(libor_rate(curve, 1.0, 1.5), 0.04 / (0.5 * 0.94), 1e-12);
    EXPECT_NEAR(libor_rate(curve, 1.0, 1.5), 0.0851064, 1e-7);
}

TEST(LiborRate, FlatCurveIsZero) {
    const auto curve = BondCurve::from_points(0.0, {{1.0, 0.95}, {1.5, 0.95}});
    EXPECT_EQ(libor_rate(curve, 1.0, 1.5), 0.0);
}

TEST(LiborRate, RejectsTNotBeforeS) {
    EXPECT_THROW(libor_rate(sample_curve(), 2.0, 1.5), std::invalid_argument);
    EXPECT_THROW(libor_rate(sample_curve(), 1.5, 1.5), std::invalid_argument);
}

TEST(SwapRate, DirectArithmetic) {
    const auto tenor = TenorStructure::make({1.0, 1.5, 2.0}, 1.0, 1.0);
    EXPECT_NEAR(swap_rate(sample_curve(), tenor), 0.03 / 0.9475, 1e-12);
    EXPECT_NEAR(swap_rate(sample_curve(), tenor), 0.0316623, 1e-7);
}

TEST(SwapRate, FlatCurveIsZero) {
    const auto flat = BondCurve::from_points(0.0, {{1.0, 0.9}, {1.5, 0.9}, {2.0, 0.9}});
    EXPECT_EQ(swap_rate(flat, TenorStructure::make({1.0, 1.5, 2.0}, 1.0, 1.0)), 0.0);
}

TEST(Curve, RejectsNonpositivePrices) {
    EXPECT_THROW(BondCurve::from_points(0.0, {{1.0, 0.9}, {1.5, 0.0}}), std::domain_error);
}

TEST(TenorStructure, OrderingViolationsAreNamed) {
    try {
        TenorStructure::make({2.0, 1.0}, 0.5, 0.5);
        FAIL() << "expected invalid_argument";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("tenor ordering"), std::string::npos);
    }
    EXPECT_THROW(TenorStructure::make({1.0, 2.0}, 1.5, 1.5), std::invalid_argument);
    EXPECT_THROW(TenorStructure::make({1.0}, 1.0, 1.0), std::invalid_argument);
}

TEST(TenorStructure, LegsAndSpacings) {
    const auto tenor = TenorStructure::make({1.0, 1.5, 2.5}, 1.0, 1.0);
    const auto tau = tenor.spacings();
    ASSERT_EQ(tau.size(), 2u);
    EXPECT_DOUBLE_EQ(tau[1], 1.0);
    const auto leg = swap_floating_leg(tenor);
    EXPECT_EQ(leg.weight_at(1.0), 1.0);
    EXPECT_EQ(leg.weight_at(2.5), -1.0);
    const auto annuity = swap_annuity(tenor);
    EXPECT_EQ(annuity.weight_at(1.0), 0.0);
    EXPECT_EQ(annuity.weight_at(1.5), 0.5);
    EXPECT_EQ(annuity.weight_at(2.5), 1.0);
}

TEST(Curve, RejectsUnsortedOrMismatched) {
    EXPECT_THROW(BondCurve(0.0, {2.0, 1.0}, {0.9, 0.95}), std::invalid_argument);
    EXPECT_THROW(BondCurve(0.0, {1.0, 2.0}, {0.9}), std::invalid_argument);
}

TEST(MergeMaturities, DropsNearDuplicates) {
    const auto m = merge_maturities({2.0, 1.0, 1.0 + 1e-12, 3.0});
    ASSERT_EQ(m.size(), 3u);
    EXPECT_DOUBLE_EQ(m[0], 1.0);
}
