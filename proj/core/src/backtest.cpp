#include "curvehedge/backtest.hpp"

#include "curvehedge/parallel.hpp"
#include "curvehedge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace curvehedge {

std::string to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::delta: return "delta";
        case StrategyKind::clark_ocone: return "clark-ocone";
        case StrategyKind::instrument: return "instrument";
    }
    return "unknown";
}

StrategyKind parse_strategy_kind(const std::string& name) {
    if (name == "delta") return StrategyKind::delta;
    if (name == "clark-ocone") return StrategyKind::clark_ocone;
    if (name == "instrument") return StrategyKind::instrument;
    throw std::invalid_argument("unknown strategy kind '" + name + "'");
}

HedgeLedger build_ledger(const CurvePath& path, double exercise, StrategyKind kind, const StrategyFunction& strategy,
                         std::size_t rebalance_every) {
    if (rebalance_every == 0) throw std::invalid_argument("rebalance interval must be positive");
    const std::size_t last = TimeGrid(path.times).index_of(exercise);
    HedgeLedger ledger;
    ledger.kind = kind;
    ledger.rebalance_every = rebalance_every;
    ledger.horizon = last;
    for (std::size_t l = 0; l < last; l += rebalance_every) {
        StrategyEstimate s = strategy(path.forward_curve(l), l);
        ledger.dates.push_back(path.times[l]);
        ledger.steps.push_back(l);
        ledger.strategies.push_back(std::move(s.phi));
        ledger.eta.push_back(s.eta);
        ledger.atom_se.push_back(std::move(s.se));
        ledger.value.push_back(s.value);
        ledger.value_se.push_back(s.value_se);
    }
    return ledger;
}

StrategyFunction delta_strategy_function(const InstrumentSpec& spec, GbmForwardModel model, GbmMcConfig mc) {
    return [spec, model = std::move(model), mc](const ForwardCurve& state, std::size_t) {
        const DeltaStrategy d = delta_strategy(state, spec, model, mc);
        StrategyEstimate s;
        s.phi = d.phi;
        s.se.assign(d.phi.size(), 0.0);
        s.value = d.price * measure_pair(state, spec.nu);
        s.eta = d.eta * measure_pair(state, spec.nu);
        return s;
    };
}

StrategyFunction clark_ocone_strategy_function(const InstrumentSpec& spec, const VolSurface& vol,
                                               NestedMcConfig config, SeedSpec seeds, std::size_t path_index) {
    return [spec, vol, config, seeds, path_index](const ForwardCurve& state, std::size_t step) {
        return clark_ocone_strategy(state, spec, vol, config, seeds.child(path_index, step));
    };
}

StrategyFunction instrument_strategy_function(const InstrumentSpec& spec, const VolSurface& vol,
                                              NestedMcConfig config, SeedSpec seeds, std::size_t path_index) {
    return [spec, vol, config, seeds, path_index](const ForwardCurve& state, std::size_t step) {
        return instrument_strategy(state, spec, vol, config, seeds.child(path_index, step));
    };
}

namespace {

void check_ledger(const CurvePath& path, const HedgeLedger& ledger) {
    if (ledger.size() == 0) throw std::invalid_argument("hedge ledger is empty");
    const TimeGrid grid(path.times);
    for (std::size_t i = 0; i < ledger.size(); ++i) {
        if (grid.index_of(ledger.dates[i]) != ledger.steps[i]) {
            throw std::invalid_argument("ledger date does not match the path grid");
        }
        if (i > 0 && ledger.steps[i] <= ledger.steps[i - 1]) {
            throw std::invalid_argument("ledger dates must be increasing");
        }
    }
    if (ledger.steps.front() != 0) throw std::invalid_argument("ledger must start at the first grid date");
}

double mark_to_market(const CurvePath& path, const HedgeLedger& ledger, std::size_t i) {
    const auto nodes = resolve_nodes(ledger.strategies[i], path.maturities);
    return pair_nodes(nodes, path.state(ledger.steps[i])) + ledger.eta[i];
}

}  // namespace

std::vector<double> rollforward(const CurvePath& path, const HedgeLedger& ledger, double initial_value) {
    check_ledger(path, ledger);
    const std::size_t end = ledger.horizon == 0 ? path.steps() : ledger.horizon;
    if (end > path.steps() || end <= ledger.steps.back()) throw std::invalid_argument("ledger horizon is off the path grid");
    std::vector<double> v(end + 1);
    v[0] = initial_value;
    std::size_t i = 0;
    auto nodes = resolve_nodes(ledger.strategies[0], path.maturities);
    for (std::size_t l = 0; l < end; ++l) {
        if (i + 1 < ledger.size() && ledger.steps[i + 1] == l) {
            ++i;
            nodes = resolve_nodes(ledger.strategies[i], path.maturities);
        }
        const auto cur = path.state(l);
        const auto next = path.state(l + 1);
        double gain = 0.0;
        for (const auto& nw : nodes) gain += nw.weight * (next[nw.node] - cur[nw.node]);
        v[l + 1] = v[l] + gain;
    }
    return v;
}

SelfFinancingResult self_financing_check(const CurvePath& path, const HedgeLedger& ledger) {
    const auto rolled = rollforward(path, ledger, mark_to_market(path, ledger, 0));
    SelfFinancingResult r;
    r.gaps.resize(ledger.size());
    for (std::size_t i = 0; i < ledger.size(); ++i) {
        r.gaps[i] = mark_to_market(path, ledger, i) - rolled[ledger.steps[i]];
        r.max_gap = std::max(r.max_gap, std::abs(r.gaps[i]));
    }
    return r;
}

namespace {

// Outer paths of X^ = P^(mu)/P^(nu) as an exact GBM, written back onto the two nodes
// of single-atom mu and nu so that the hedging code sees an ordinary curve path.
class GbmWorld {
public:
    GbmWorld(const ForwardCurve& start, const InstrumentSpec& spec, const GbmForwardModel& model, TimeGrid grid)
        : grid_(std::move(grid)), numeraire_(spec.nu) {
        if (spec.mu.size() != 1 || spec.nu.size() != 1) {
            throw std::invalid_argument("the GBM backtest world needs single-atom mu and nu");
        }
        const Atom a = spec.mu.atoms().front();
        const Atom n = spec.nu.atoms().front();
        if (same_maturity(a.maturity, n.maturity)) throw std::invalid_argument("mu and nu must differ");
        maturities_ = {std::min(a.maturity, n.maturity), std::max(a.maturity, n.maturity)};
        asset_node_ = a.maturity < n.maturity ? 0 : 1;
        asset_weight_ = a.weight;
        numeraire_level_ = 1.0 / n.weight;
        x0_ = measure_pair(start, spec.mu) / measure_pair(start, spec.nu);
        factors_ = model.factors;
        const std::size_t steps = grid_.steps();
        sigma_.assign(steps * factors_, 0.0);
        half_var_.assign(steps, 0.0);
        for (std::size_t l = 0; l < steps; ++l) {
            const double h = grid_.dt(l) / kStepQuadraturePoints;
            for (int q = 0; q < kStepQuadraturePoints; ++q) {
                const auto s = model.sigma(grid_.time(l) + (q + 0.5) * h);
                for (std::size_t f = 0; f < factors_; ++f) sigma_[l * factors_ + f] += s[f] / kStepQuadraturePoints;
            }
            double sq = 0.0;
            for (std::size_t f = 0; f < factors_; ++f) sq += sigma_[l * factors_ + f] * sigma_[l * factors_ + f];
            half_var_[l] = 0.5 * sq * grid_.dt(l);
        }
    }

    void evolve(std::span<const double> increments, CurvePath& out) const {
        const std::size_t steps = grid_.steps();
        out.measure = PathMeasure::forward;
        out.times.assign(grid_.times().begin(), grid_.times().end());
        out.maturities = maturities_;
        out.factors = factors_;
        out.numeraire = numeraire_;
        out.rn_weight.reset();
        out.increments.assign(increments.begin(), increments.end());
        out.values.resize((steps + 1) * 2);
        double x = x0_;
        for (std::size_t l = 0; l <= steps; ++l) {
            if (l > 0) {
                double dot = 0.0;
                for (std::size_t f = 0; f < factors_; ++f) {
                    dot += sigma_[(l - 1) * factors_ + f] * increments[(l - 1) * factors_ + f];
                }
                x *= std::exp(dot - half_var_[l - 1]);
            }
            out.values[l * 2 + asset_node_] = x * numeraire_level_ / asset_weight_;
            out.values[l * 2 + 1 - asset_node_] = numeraire_level_;
        }
    }

private:
    TimeGrid grid_;
    DiscreteMeasure numeraire_;
    std::vector<double> maturities_;
    std::size_t asset_node_ = 0;
    double asset_weight_ = 1.0;
    double numeraire_level_ = 1.0;
    double x0_ = 1.0;
    std::size_t factors_ = 1;
    std::vector<double> sigma_;
    std::vector<double> half_var_;
};

struct LevelAccumulator {
    RunningStats error;
    RunningStats initial;
    RunningStats payoff;
    double max_abs = 0.0;
    std::vector<double> sf_gap;
    std::vector<double> sf_se;

    void merge(const LevelAccumulator& o) {
        error.merge(o.error);
        initial.merge(o.initial);
        payoff.merge(o.payoff);
        max_abs = std::max(max_abs, o.max_abs);
        if (sf_gap.size() < o.sf_gap.size()) {
            sf_gap.resize(o.sf_gap.size(), 0.0);
            sf_se.resize(o.sf_se.size(), 0.0);
        }
        for (std::size_t i = 0; i < o.sf_gap.size(); ++i) {
            sf_gap[i] = std::max(sf_gap[i], o.sf_gap[i]);
            sf_se[i] = std::max(sf_se[i], o.sf_se[i]);
        }
    }
};

}  // namespace

BacktestReport replication_report(const ForwardCurve& start, const InstrumentSpec& spec, const VolSurface& vol,
                                  const ReplicationConfig& config) {
    if (config.paths == 0) throw std::invalid_argument("backtest needs at least one path");
    if (config.steps.empty()) throw std::invalid_argument("backtest needs at least one step count");
    for (std::size_t k = 0; k < config.steps.size(); ++k) {
        if (config.steps[k] == 0 || (k > 0 && config.steps[k] <= config.steps[k - 1])) {
            throw std::invalid_argument("backtest step counts must be positive and increasing");
        }
    }
    if (!(spec.exercise > start.time())) throw std::invalid_argument("backtest needs T after the start date");
    if (start.numeraire() != spec.nu) throw std::invalid_argument("start curve must be normalized by the instrument's nu");

    const double t0 = start.time();
    const double T = spec.exercise;
    const std::size_t levels = config.steps.size();
    const std::size_t finest = config.steps.back();
    const std::size_t d = vol.factors();
    const Payoff g = spec.payoff();

    const GbmForwardModel model = effective_vol(vol, spec, &start);
    const ForwardEulerSimulator fine(start, vol, TimeGrid::uniform(t0, T, finest));
    std::vector<ForwardEulerSimulator> curve_sims;
    std::vector<GbmWorld> gbm_sims;
    for (std::size_t n : config.steps) {
        const TimeGrid grid = TimeGrid::uniform(t0, T, n);
        if (config.world == BacktestWorld::curve) {
            curve_sims.emplace_back(start, vol, grid);
        } else {
            gbm_sims.emplace_back(start, spec, model, grid);
        }
    }

    std::vector<std::vector<LevelAccumulator>> partial(block_count(config.paths),
                                                       std::vector<LevelAccumulator>(levels));
    parallel_blocks(config.paths, config.threads, [&](std::size_t block, std::size_t begin, std::size_t end) {
        std::vector<double> fine_inc(finest * d);
        CurvePath path;
        for (std::size_t p = begin; p < end; ++p) {
            auto rng = config.seeds.stream(p);
            fine.draw_increments(rng, fine_inc);
            for (std::size_t k = 0; k < levels; ++k) {
                const std::size_t n = config.steps[k];
                std::vector<double> inc;
                if (finest % n == 0) {
                    inc = aggregate_increments(fine_inc, d, finest / n);
                } else {
                    inc.resize(n * d);
                    auto own = config.seeds.child(p, k).stream(0);
                    curve_sims.empty() ? fine.draw_increments(own, inc) : curve_sims[k].draw_increments(own, inc);
                }
                if (config.world == BacktestWorld::curve) {
                    curve_sims[k].evolve(inc, path);
                } else {
                    gbm_sims[k].evolve(inc, path);
                }

                const SeedSpec inner_seeds = config.seeds.child(0xbac, k);
                StrategyFunction strategy;
                switch (config.kind) {
                    case StrategyKind::delta: strategy = delta_strategy_function(spec, model, config.gbm); break;
                    case StrategyKind::clark_ocone:
                        strategy = clark_ocone_strategy_function(spec, vol, config.inner, inner_seeds, p);
                        break;
                    case StrategyKind::instrument:
                        strategy = instrument_strategy_function(spec, vol, config.inner, inner_seeds, p);
                        break;
                }
                const HedgeLedger ledger = build_ledger(path, T, config.kind, strategy, config.rebalance_every);
                const auto sf = self_financing_check(path, ledger);
                const double v0 = mark_to_market(path, ledger, 0);
                const auto rolled = rollforward(path, ledger, v0);

                const auto terminal = path.state(path.steps());
                const double p_nu = pair_nodes(resolve_nodes(spec.nu, path.maturities), terminal);
                const double p_mu = pair_nodes(resolve_nodes(spec.mu, path.maturities), terminal);
                const double claim = p_nu * g(p_mu / p_nu);
                const double error = rolled.back() - claim;

                LevelAccumulator& acc = partial[block][k];
                acc.error.add(error);
                acc.initial.add(v0);
                acc.payoff.add(claim);
                acc.max_abs = std::max(acc.max_abs, std::abs(error));
                acc.sf_gap.resize(ledger.size(), 0.0);
                acc.sf_se.resize(ledger.size(), 0.0);
                for (std::size_t i = 0; i < ledger.size(); ++i) {
                    acc.sf_gap[i] = std::max(acc.sf_gap[i], std::abs(sf.gaps[i]));
                    acc.sf_se[i] = std::max(acc.sf_se[i], ledger.value_se[i]);
                }
            }
        }
    });

    BacktestReport report;
    report.kind = config.kind;
    report.world = config.world;
    report.paths = config.paths;
    report.rebalance_every = config.rebalance_every;
    std::vector<double> log_dt, log_sd;
    bool all_positive = true;
    for (std::size_t k = 0; k < levels; ++k) {
        LevelAccumulator total;
        for (const auto& b : partial) total.merge(b[k]);
        BacktestRow row;
        row.steps = config.steps[k];
        row.dt = (T - t0) / static_cast<double>(row.steps);
        row.mean = total.error.mean;
        row.sd = total.error.sd();
        row.se = total.error.se();
        row.max_abs = total.max_abs;
        row.initial_value = total.initial.mean;
        row.initial_value_se = total.initial.se();
        row.payoff_mean = total.payoff.mean;
        row.payoff_se = total.payoff.se();
        row.sf_max_gap = total.sf_gap;
        row.sf_value_se = total.sf_se;
        for (std::size_t i = 0; i < total.sf_gap.size(); ++i) {
            row.sf_dates.push_back(t0 + static_cast<double>(i * config.rebalance_every) * row.dt);
        }
        if (!(row.sd > 0.0)) all_positive = false;
        log_dt.push_back(std::log(row.dt));
        log_sd.push_back(std::log(row.sd));
        report.rows.push_back(std::move(row));
    }
    report.slope = (all_positive && levels > 1) ? regression_slope(log_dt, log_sd)
                                                : std::numeric_limits<double>::quiet_NaN();
    return report;
}

}  // namespace curvehedge
