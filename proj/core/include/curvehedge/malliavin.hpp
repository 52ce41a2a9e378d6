#pragma once

#include "curvehedge/hedging.hpp"
#include "curvehedge/instrument.hpp"
#include "curvehedge/market_model.hpp"
#include "curvehedge/rng.hpp"
#include "curvehedge/simulation.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace curvehedge {

/// sigma^_t(P^, y) = P^(y) sum_z nu_z P^(z) (zeta_t(y) - zeta_t(z)), nu the curve's numeraire.
/// Throws LookupError if y or an atom of nu is not a node of the curve.
std::vector<double> sigma_hat_field(const ForwardCurve& curve, const VolSurface& vol, double t, double y);

/// D_t P^_u(y) = sigma^_t(P^_u, y): volatility at time t, curve at u = curve.time().
/// Throws std::invalid_argument when t > u.
std::vector<double> malliavin_derivative(const ForwardCurve& curve_u, const VolSurface& vol, double t, double y);

/// Integrand alpha^ of the predictable representation, estimated at the dates of one path.
struct AlphaProcess {
    std::vector<double> dates;
    std::vector<std::vector<double>> values;
    std::vector<std::vector<double>> se;
    /// Full nested-MC output per date (terms, phi and value), for diagnostics.
    std::vector<ClarkOconeMoments> moments;
};

/// Assumes the payoff and its derivative are square integrable under the forward
/// measure; this is not checked.
/// Evaluates alpha^ at every grid date t_l < T of a forward-measure path. Date l
/// uses the inner seeds seeds.child(l).
AlphaProcess alpha_process(const CurvePath& path, const InstrumentSpec& spec, const VolSurface& vol,
                           const NestedMcConfig& config, const SeedSpec& seeds);

/// sum_y phi({y}) sigma^_t(P^_t, y): the integrand implied by a bond portfolio.
std::vector<double> alpha_from_portfolio(const ForwardCurve& state, const VolSurface& vol,
                                         const DiscreteMeasure& phi);

/// alpha^ at a state; `path` and `step` identify the inner seed stream.
using AlphaEvaluator =
    std::function<void(const ForwardCurve& state, std::size_t path, std::size_t step, std::span<double> alpha)>;

/// Nested-MC alpha evaluator with inner seeds seeds.child(path, step).
AlphaEvaluator nested_alpha_evaluator(const InstrumentSpec& spec, const VolSurface& vol, NestedMcConfig config,
                                      SeedSpec seeds);

struct ResidualStats {
    std::size_t steps = 0;
    double dt = 0.0;
    std::size_t paths = 0;
    double mean = 0.0;
    double sd = 0.0;
    double se = 0.0;
};

struct ResidualRefinement {
    std::vector<ResidualStats> rows;
    /// Least-squares slope of log SD against log dt; NaN when any SD is zero.
    double slope = 0.0;
};

struct ResidualConfig {
    std::size_t paths = 10000;
    std::vector<std::size_t> steps{25, 50, 100, 200};
    SeedSpec seeds{};
    std::size_t threads = 1;
};

/// Per path R = xi^ - price - sum_l <alpha^_{t_l}, dW^_l> on forward-measure Euler
/// paths from `start` to T, for each step count. `price` is E^[xi^].
/// Brownian increments are drawn on the finest grid and summed onto coarser
/// ones when the step counts divide, so all levels see the same noise.
ResidualRefinement co_representation_residual(const ForwardCurve& start, const InstrumentSpec& spec,
                                              const VolSurface& vol, double price, const AlphaEvaluator& alpha,
                                              const ResidualConfig& config);

/// Residual statistics for already simulated paths sharing one grid.
ResidualStats co_representation_residual(std::span<const CurvePath> paths, const InstrumentSpec& spec, double price,
                                         const AlphaEvaluator& alpha);

struct BumpResult {
    double derivative = 0.0;          // <D_{t_l} P^_T(y), e>
    double finite_difference = 0.0;   // (P^_T^eps(y) - P^_T(y)) / eps
    double relative_error = 0.0;
};

/// Pathwise check of the Malliavin derivative on an exact discounted path:
/// the step-l increment of factor e is shifted by eps and the path re-run.
BumpResult bump_check(const DiscountedSimulator& sim, std::span<const double> increments,
                      const DiscreteMeasure& nu, const VolSurface& vol, std::size_t step, std::size_t factor,
                      double y, double eps = 1e-5);

}  // namespace curvehedge
