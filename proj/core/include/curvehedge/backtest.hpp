#pragma once

#include "curvehedge/analytic.hpp"
#include "curvehedge/hedging.hpp"
#include "curvehedge/instrument.hpp"
#include "curvehedge/market_model.hpp"
#include "curvehedge/simulation.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace curvehedge {

enum class StrategyKind { delta, clark_ocone, instrument };

std::string to_string(StrategyKind kind);
StrategyKind parse_strategy_kind(const std::string& name);

/// Portfolios chosen along one path at its rebalance dates.
struct HedgeLedger {
    StrategyKind kind = StrategyKind::delta;
    std::size_t rebalance_every = 1;
    /// Grid index of the exercise date; 0 means the last node of the path.
    std::size_t horizon = 0;
    std::vector<double> dates;
    std::vector<std::size_t> steps;                // grid index of each date
    std::vector<DiscreteMeasure> strategies;
    std::vector<double> eta;
    std::vector<std::vector<double>> atom_se;      // per date, per atom of the strategy
    std::vector<double> value;                     // strategy's own estimate of V^_t
    std::vector<double> value_se;

    std::size_t size() const { return dates.size(); }
};

/// Strategy at the grid date `step` of a path, given the state there.
using StrategyFunction = std::function<StrategyEstimate(const ForwardCurve& state, std::size_t step)>;

/// Evaluates `strategy` at grid steps 0, k, 2k, ... strictly before the exercise date.
HedgeLedger build_ledger(const CurvePath& path, double exercise, StrategyKind kind, const StrategyFunction& strategy,
                         std::size_t rebalance_every = 1);

/// Adapters from the hedging module to StrategyFunction. Inner seeds for the
/// nested estimators are seeds.child(path_index, step).
StrategyFunction delta_strategy_function(const InstrumentSpec& spec, GbmForwardModel model, GbmMcConfig mc = {});
StrategyFunction clark_ocone_strategy_function(const InstrumentSpec& spec, const VolSurface& vol,
                                               NestedMcConfig config, SeedSpec seeds, std::size_t path_index);
StrategyFunction instrument_strategy_function(const InstrumentSpec& spec, const VolSurface& vol,
                                              NestedMcConfig config, SeedSpec seeds, std::size_t path_index);

/// V^_{l+1} = V^_l + sum_y phi_l({y}) (P^_{l+1}(y) - P^_l(y)) with phi held between
/// rebalance dates. Returns V^ at every grid node up to the exercise date.
/// Throws std::invalid_argument when a ledger date is not a grid node.
std::vector<double> rollforward(const CurvePath& path, const HedgeLedger& ledger, double initial_value);

struct SelfFinancingResult {
    /// Per ledger date: <phi_l, P^_l> + eta_l - rolled value (zero at the first date).
    std::vector<double> gaps;
    double max_gap = 0.0;
};

/// Rolls from the first mark-to-market value and compares at each later rebalance date.
SelfFinancingResult self_financing_check(const CurvePath& path, const HedgeLedger& ledger);

/// The world in which the outer paths are drawn.
enum class BacktestWorld {
    curve,  // forward-measure Euler paths of the whole curve under zeta
    gbm     // X^ simulated exactly as the effective GBM; single-atom mu and nu only
};

struct ReplicationConfig {
    StrategyKind kind = StrategyKind::delta;
    BacktestWorld world = BacktestWorld::curve;
    std::size_t paths = 1000;
    std::vector<std::size_t> steps{25, 50, 100, 200};
    std::size_t rebalance_every = 1;
    SeedSpec seeds{};
    NestedMcConfig inner{};
    GbmMcConfig gbm{};
    std::size_t threads = 1;
};

struct BacktestRow {
    std::size_t steps = 0;
    double dt = 0.0;
    double mean = 0.0;      // terminal error V^_T - xi^
    double sd = 0.0;
    double se = 0.0;
    double max_abs = 0.0;
    double initial_value = 0.0;      // mean V^_0
    double initial_value_se = 0.0;
    double payoff_mean = 0.0;        // independent MC price of xi^
    double payoff_se = 0.0;
    /// Per rebalance date: max over paths of |mark-to-market - rolled value|.
    std::vector<double> sf_max_gap;
    /// Per rebalance date: max over paths of the strategy's value SE.
    std::vector<double> sf_value_se;
    std::vector<double> sf_dates;
};

struct BacktestReport {
    StrategyKind kind = StrategyKind::delta;
    BacktestWorld world = BacktestWorld::curve;
    std::size_t paths = 0;
    std::size_t rebalance_every = 1;
    std::vector<BacktestRow> rows;   // sorted by steps
    /// Least-squares slope of log terminal-error SD against log dt; NaN if any SD is zero.
    double slope = 0.0;
};

/// Simulates outer paths from `start` to T for each step count, hedges them with
/// the chosen strategy starting from its own V^_0, and records V^_T - xi^.
/// Increments are drawn on the finest grid and summed onto the coarser ones
/// when the step counts divide.
BacktestReport replication_report(const ForwardCurve& start, const InstrumentSpec& spec, const VolSurface& vol,
                                  const ReplicationConfig& config);

}  // namespace curvehedge
