#pragma once

#include "curvehedge/analytic.hpp"
#include "curvehedge/instrument.hpp"
#include "curvehedge/market_model.hpp"
#include "curvehedge/rng.hpp"
#include "curvehedge/simulation.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace curvehedge {

/// Lower bound on the inner sample size of the Clark-Ocone estimators.
inline constexpr std::size_t kMinInnerPaths = 1000;

/// Budget of the conditional-expectation estimator launched from a date-t state.
struct NestedMcConfig {
    std::size_t inner_paths = 10000;
    /// Largest inner Euler step; infinity means a single step from t to T, which is
    /// exact whenever the forward volatility b is deterministic (bond options and
    /// caplets under a deterministic zeta whose maturity differences do not depend on t).
    double max_inner_dt = 0.05;
    /// Pair each inner path with its reflection -dW^ (all inner paths of one date share
    /// the same draws across atoms).
    bool antithetic = true;
    std::size_t threads = 1;
};

/// Inner time grid from t to the horizon honoring max_dt.
TimeGrid inner_grid(double t, double horizon, double max_dt);

/// Per-path functional of the terminal forward curve (values at the state's nodes).
using InnerIntegrand = std::function<void(std::span<const double> terminal, std::span<double> out)>;

struct InnerEstimate {
    std::vector<double> mean;
    std::vector<double> se;
    std::size_t paths = 0;
};

/// E^[f(P^_T) | F_t] for each channel of f, from forward-measure Euler paths
/// started at `state`. Standard errors are computed over antithetic pair means.
InnerEstimate inner_expectations(const ForwardCurve& state, double horizon, const VolSurface& vol,
                                 const NestedMcConfig& config, const SeedSpec& seeds, std::size_t channels,
                                 const InnerIntegrand& integrand);

/// All conditional expectations behind the Clark-Ocone portfolio and the
/// representation integrand, estimated from one set of inner paths.
struct ClarkOconeMoments {
    std::vector<double> support;   // support(mu) U support(nu)
    std::vector<double> phi;       // portfolio weight per support atom
    std::vector<double> phi_se;
    double value = 0.0;            // E^[g^(P^_T(mu)) | F_t]
    double value_se = 0.0;
    double eta = 0.0;              // value - <phi, P^_t>
    double eta_se = 0.0;
    std::size_t factors = 0;
    /// Three terms of alpha^_t (each d-dimensional): alpha = terms[0] - terms[1] + terms[2].
    std::array<std::vector<double>, 3> alpha_terms;
    std::array<std::vector<double>, 3> alpha_terms_se;
    std::vector<double> alpha;
    std::vector<double> alpha_se;
    std::size_t paths = 0;
};

ClarkOconeMoments clark_ocone_moments(const ForwardCurve& state, const InstrumentSpec& spec, const VolSurface& vol,
                                      const NestedMcConfig& config, const SeedSpec& seeds, bool with_alpha);

/// A hedging portfolio phi_t (bond units per maturity) with its diagnostics.
struct StrategyEstimate {
    DiscreteMeasure phi;
    std::vector<double> se;   // per atom of phi, in atom order
    double value = 0.0;
    double value_se = 0.0;
    double eta = 0.0;
    double eta_se = 0.0;
    std::size_t inner_paths = 0;

    double atom_se(double maturity) const;
};

/// phi_t(dy) = E^[P^_T(y)/P^_t(y) g'(P^_T(mu)) | F_t] mu(dy)
///           + E^[(g(P^_T(mu)) - P^_T(mu) g'(P^_T(mu))) P^_T(y)/P^_t(y) | F_t] nu(dy).
/// Requires config.inner_paths >= kMinInnerPaths.
StrategyEstimate clark_ocone_strategy(const ForwardCurve& state, const InstrumentSpec& spec, const VolSurface& vol,
                                      const NestedMcConfig& config, const SeedSpec& seeds);

/// Per-instrument specializations of the Clark-Ocone portfolio: bond options and
/// caplets use closed-form conditional expectations under the effective GBM
/// volatility; exchange options and swaptions use nested Monte Carlo.
/// Throws std::invalid_argument for generic instruments.
StrategyEstimate instrument_strategy(const ForwardCurve& state, const InstrumentSpec& spec, const VolSurface& vol,
                                     const NestedMcConfig& config, const SeedSpec& seeds);

struct GbmMcConfig {
    std::size_t paths = 100000;
    SeedSpec seeds{};
};

struct DeltaStrategy {
    DiscreteMeasure phi;
    double eta = 0.0;
    double price = 0.0;     // C^(t, X^_t)
    double delta = 0.0;     // dC^/dx
    double forward = 0.0;   // X^_t
    double vol = 0.0;       // v(t, T)
};

/// phi_t = dC^/dx mu + (C^ - X^ dC^/dx) nu under the GBM forward model. Call-type
/// instruments use the closed form (swaptions in the regrouped per-maturity form);
/// generic payoffs use a GBM Monte Carlo price and a central difference with
/// h = 1e-4 X^_t on common random numbers.
DeltaStrategy delta_strategy(const ForwardCurve& state, const InstrumentSpec& spec, const GbmForwardModel& model,
                             const GbmMcConfig& mc = {});

/// Portfolio held in the asset basket P(mu) and the numeraire basket P(nu).
struct TwoAssetPortfolio {
    double asset_units = 0.0;
    DiscreteMeasure asset;
    double numeraire_units = 0.0;
    DiscreteMeasure numeraire;

    double value(const Curve& curve) const;
    DiscreteMeasure as_measure() const;
};

/// Swaption hedge written as Phi+ (delta_{T_i} - delta_{T_j}) - kappa Phi- sum tau_k delta_{T_{k+1}}.
TwoAssetPortfolio jamshidian_strategy(const ForwardCurve& state, const InstrumentSpec& spec,
                                      const GbmForwardModel& model);

/// Forward value <phi_t, P^_t> + eta_t. Multiply by P_t(nu) for the cash value.
double hedge_value(const ForwardCurve& state, const DiscreteMeasure& phi, double eta);

}  // namespace curvehedge
