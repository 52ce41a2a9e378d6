#include "commands.hpp"

#include "curvehedge/analytic.hpp"
#include "curvehedge/backtest.hpp"
#include "curvehedge/hedging.hpp"
#include "curvehedge/malliavin.hpp"
#include "curvehedge/parallel.hpp"
#include "curvehedge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>

namespace curvehedge::cli {

namespace {

constexpr double kFloor = 1e-12;

struct Analytic {
    double price = 0.0;   // forward price in numeraire units
    double forward = 0.0; // X^_t0
    double vol = 0.0;     // v(t0, T)
    double strike = 0.0;
    bool approximate = false;
};

std::optional<Analytic> analytic_price(const Model& m) {
    const auto& spec = m.spec;
    const bool single = spec.mu.size() == 1 && spec.nu.size() == 1;
    if (!spec.is_call()) return std::nullopt;
    if (spec.kind == InstrumentKind::exchange && !single) return std::nullopt;
    const GbmForwardModel model = effective_vol(m.vol, spec, &m.curve0);
    Analytic a;
    a.forward = measure_pair(m.start, spec.mu) / measure_pair(m.start, spec.nu);
    a.vol = integrated_vol(model, m.start.time(), spec.exercise);
    a.strike = spec.effective_strike();
    a.price = forward_call_price(a.forward, a.strike, a.vol) * measure_pair(m.start, spec.nu);
    a.approximate = !model.note.empty();
    return a;
}

NestedMcConfig inner_config(const RunConfig& run) {
    NestedMcConfig c;
    c.inner_paths = run.inner_paths;
    c.max_inner_dt = run.max_inner_dt;
    c.threads = run.threads;
    return c;
}

double forward_claim(const Payoff& g, std::span<const NodeWeight> mu, std::span<const NodeWeight> nu,
                     std::span<const double> state) {
    const double p_nu = pair_nodes(nu, state);
    return p_nu * g(pair_nodes(mu, state) / p_nu);
}

// One pass over both simulation routes: forward-measure Euler and exact
// discounted paths reweighted by P~_T(nu) / P~_0(nu).
struct Routes {
    RunningStats euler_payoff;
    RunningStats exact_payoff;
    std::vector<RunningStats> euler_node;
    std::vector<RunningStats> exact_node;
    double euler_norm = 0.0;
    double exact_norm = 0.0;

    void merge(const Routes& o) {
        euler_payoff.merge(o.euler_payoff);
        exact_payoff.merge(o.exact_payoff);
        for (std::size_t i = 0; i < euler_node.size(); ++i) {
            euler_node[i].merge(o.euler_node[i]);
            exact_node[i].merge(o.exact_node[i]);
        }
        euler_norm = std::max(euler_norm, o.euler_norm);
        exact_norm = std::max(exact_norm, o.exact_norm);
    }
};

Routes run_routes(const Model& m, std::size_t paths, std::size_t steps, const SeedSpec& seeds, std::size_t threads) {
    const TimeGrid grid = TimeGrid::uniform(m.start.time(), m.spec.exercise, steps);
    const ForwardEulerSimulator euler(m.start, m.vol, grid);
    const DiscountedSimulator exact(m.curve0, m.vol, grid);
    const std::size_t n = m.start.size();
    const auto mats = m.start.maturities();
    const auto mu = resolve_nodes(m.spec.mu, mats);
    const auto nu = resolve_nodes(m.spec.nu, mats);
    const Payoff g = m.spec.payoff();
    const SeedSpec euler_seeds = seeds.child(1);
    const SeedSpec exact_seeds = seeds.child(2);

    std::vector<Routes> partial(block_count(paths));
    for (auto& r : partial) {
        r.euler_node.resize(n);
        r.exact_node.resize(n);
    }
    parallel_blocks(paths, threads, [&](std::size_t block, std::size_t begin, std::size_t end) {
        Routes& r = partial[block];
        CurvePath path;
        std::vector<double> fwd(n);
        for (std::size_t p = begin; p < end; ++p) {
            euler.simulate(p, euler_seeds, path);
            for (std::size_t l = 0; l <= path.steps(); ++l) {
                r.euler_norm = std::max(r.euler_norm, std::abs(pair_nodes(nu, path.state(l)) - 1.0));
            }
            const auto last = path.state(path.steps());
            r.euler_payoff.add(forward_claim(g, mu, nu, last));
            for (std::size_t i = 0; i < n; ++i) r.euler_node[i].add(last[i]);

            exact.simulate(p, exact_seeds, path);
            const double weight = pair_nodes(nu, path.state(path.steps())) / pair_nodes(nu, path.state(0));
            for (std::size_t l = 0; l <= path.steps(); ++l) {
                const auto s = path.state(l);
                const double p_nu = pair_nodes(nu, s);
                for (std::size_t i = 0; i < n; ++i) fwd[i] = s[i] / p_nu;
                r.exact_norm = std::max(r.exact_norm, std::abs(pair_nodes(nu, fwd) - 1.0));
            }
            r.exact_payoff.add(weight * forward_claim(g, mu, nu, fwd));
            for (std::size_t i = 0; i < n; ++i) r.exact_node[i].add(weight * fwd[i]);
        }
    });
    Routes total = partial.front();
    for (std::size_t b = 1; b < partial.size(); ++b) total.merge(partial[b]);
    return total;
}

void add_meta(Table& t, const std::string& command, const ExperimentConfig& c) {
    t.meta("curvehedge", kVersion);
    t.meta("command", command);
    t.meta("config_hash", config_hash(c));
    t.meta("seed", std::to_string(c.run.seed));
    if (c.instrument.kind == InstrumentKind::swaption) t.meta("approximation", "frozen-vol approximation");
}

double cash_factor(const ExperimentConfig& c, const Model& m, double t) {
    return measure_pair(m.curve0, m.spec.nu) * std::exp(c.market.short_rate * (t - m.start.time()));
}

}  // namespace

Table price_table(const ExperimentConfig& c) {
    const Model m = build_model(c);
    Table t;
    add_meta(t, "price", c);
    const double t0 = m.start.time();
    const double T = m.spec.exercise;
    const double cash = cash_factor(c, m, t0);
    if (const auto a = analytic_price(m)) {
        const std::string method = a->approximate ? "analytic_frozen_vol" : "analytic";
        t.add({"price", std::nullopt, t0, T, "forward_" + method, a->price, 0.0, ""});
        t.add({"price", std::nullopt, t0, T, "cash_" + method, a->price * cash, 0.0, ""});
        t.add({"price", std::nullopt, t0, T, "integrated_vol", a->vol, 0.0, ""});
    }
    const SeedSpec seeds{c.run.seed};
    for (std::size_t steps : c.run.steps) {
        const Routes r = run_routes(m, c.run.paths, steps, seeds.child(steps), c.run.threads);
        t.add({"price", steps, t0, T, "forward_mc_euler", r.euler_payoff.mean, r.euler_payoff.se(), ""});
        t.add({"price", steps, t0, T, "cash_mc_euler", r.euler_payoff.mean * cash, r.euler_payoff.se() * cash, ""});
        t.add({"price", steps, t0, T, "forward_mc_exact", r.exact_payoff.mean, r.exact_payoff.se(), ""});
        t.add({"price", steps, t0, T, "cash_mc_exact", r.exact_payoff.mean * cash, r.exact_payoff.se() * cash, ""});
    }
    return t;
}

Table hedge_table(const ExperimentConfig& c) {
    const Model m = build_model(c);
    Table t;
    add_meta(t, "hedge", c);
    t.meta("strategy", to_string(c.run.strategy));
    const SeedSpec seeds{c.run.seed};
    const std::size_t steps = c.run.steps.front();
    const ForwardEulerSimulator sim(m.start, m.vol, TimeGrid::uniform(m.start.time(), m.spec.exercise, steps));
    CurvePath path;
    sim.simulate(0, seeds.child(1), path);

    StrategyFunction strategy;
    switch (c.run.strategy) {
        case StrategyKind::delta:
            strategy = delta_strategy_function(m.spec, effective_vol(m.vol, m.spec, &m.curve0),
                                               GbmMcConfig{c.run.paths, seeds.child(3)});
            break;
        case StrategyKind::clark_ocone:
            strategy = clark_ocone_strategy_function(m.spec, m.vol, inner_config(c.run), seeds.child(2), 0);
            break;
        case StrategyKind::instrument:
            strategy = instrument_strategy_function(m.spec, m.vol, inner_config(c.run), seeds.child(2), 0);
            break;
    }
    const HedgeLedger ledger = build_ledger(path, m.spec.exercise, c.run.strategy, strategy, c.run.rebalance_every);
    for (std::size_t i = 0; i < ledger.size(); ++i) {
        const double date = ledger.dates[i];
        const auto& atoms = ledger.strategies[i].atoms();
        for (std::size_t a = 0; a < atoms.size(); ++a) {
            const double se = a < ledger.atom_se[i].size() ? ledger.atom_se[i][a] : 0.0;
            t.add({"hedge", ledger.steps[i], date, atoms[a].maturity, "weight", atoms[a].weight, se, ""});
        }
        t.add({"hedge", ledger.steps[i], date, std::nullopt, "eta", ledger.eta[i], ledger.value_se[i], ""});
        t.add({"hedge", ledger.steps[i], date, std::nullopt, "forward_value", ledger.value[i], ledger.value_se[i], ""});
        const double cash = cash_factor(c, m, date);
        t.add({"hedge", ledger.steps[i], date, std::nullopt, "cash_value", ledger.value[i] * cash,
               ledger.value_se[i] * cash, ""});
    }
    return t;
}

Table backtest_table(const ExperimentConfig& c) {
    const Model m = build_model(c);
    Table t;
    add_meta(t, "backtest", c);
    t.meta("strategy", to_string(c.run.strategy));
    t.meta("world", to_string(c.run.world));
    t.meta("rebalance_every", std::to_string(c.run.rebalance_every));
    ReplicationConfig rc;
    rc.kind = c.run.strategy;
    rc.world = c.run.world;
    rc.paths = c.run.paths;
    rc.steps = c.run.steps;
    rc.rebalance_every = c.run.rebalance_every;
    rc.seeds = SeedSpec{c.run.seed};
    rc.inner = inner_config(c.run);
    rc.inner.threads = 1;
    rc.gbm = GbmMcConfig{std::min<std::size_t>(c.run.paths, 10000), rc.seeds.child(3)};
    rc.threads = c.run.threads;
    const BacktestReport report = replication_report(m.start, m.spec, m.vol, rc);
    const double T = m.spec.exercise;
    for (const auto& row : report.rows) {
        const double n = static_cast<double>(report.paths);
        const double sd_se = n > 1 ? row.sd / std::sqrt(2.0 * (n - 1)) : 0.0;
        t.add({"backtest", row.steps, T, std::nullopt, "error_mean", row.mean, row.se, ""});
        t.add({"backtest", row.steps, T, std::nullopt, "error_sd", row.sd, sd_se, ""});
        t.add({"backtest", row.steps, T, std::nullopt, "error_max_abs", row.max_abs, 0.0, ""});
        t.add({"backtest", row.steps, m.start.time(), std::nullopt, "initial_value", row.initial_value,
               row.initial_value_se, ""});
        t.add({"backtest", row.steps, T, std::nullopt, "payoff_mean", row.payoff_mean, row.payoff_se, ""});
        for (std::size_t i = 0; i < row.sf_max_gap.size(); ++i) {
            t.add({"self-financing", row.steps, row.sf_dates[i], std::nullopt, "max_gap", row.sf_max_gap[i],
                   row.sf_value_se[i], ""});
        }
    }
    t.add({"backtest", std::nullopt, std::nullopt, std::nullopt, "error_sd_slope", report.slope, 0.0, ""});
    return t;
}

Table verify_table(const ExperimentConfig& c) {
    const Model m = build_model(c);
    Table t;
    add_meta(t, "verify", c);
    const SeedSpec seeds{c.run.seed};
    const double t0 = m.start.time();
    const double T = m.spec.exercise;
    auto check = [&](const std::string& name, std::optional<double> maturity, double value, double se, bool pass) {
        t.add({"verify", std::nullopt, t0, maturity, name, value, se, pass ? "pass" : "fail"});
    };
    auto info = [&](const std::string& name, std::optional<double> maturity, double value, double se) {
        t.add({"verify", std::nullopt, t0, maturity, name, value, se, "info"});
    };

    // Simulation routes.
    const Routes r = run_routes(m, c.run.paths, c.run.steps.back(), seeds.child(1), c.run.threads);
    check("normalization_euler", std::nullopt, r.euler_norm, 0.0, r.euler_norm <= kNormalizationTolerance);
    check("normalization_exact", std::nullopt, r.exact_norm, 0.0, r.exact_norm <= kNormalizationTolerance);
    const auto mats = m.start.maturities();
    for (std::size_t i = 0; i < mats.size(); ++i) {
        if (mats[i] < T - kMaturityTolerance) continue;
        const double p0 = m.start.values()[i];
        const auto& e = r.euler_node[i];
        const auto& x = r.exact_node[i];
        check("martingale_euler", mats[i], e.mean - p0, e.se(), within_standard_errors(e.mean, p0, e.se(), 0.0, 3.0, kFloor));
        check("martingale_exact", mats[i], x.mean - p0, x.se(), within_standard_errors(x.mean, p0, x.se(), 0.0, 3.0, kFloor));
    }
    const double route_se = std::hypot(r.euler_payoff.se(), r.exact_payoff.se());
    check("price_routes", std::nullopt, r.euler_payoff.mean - r.exact_payoff.mean, route_se,
          within_standard_errors(r.euler_payoff.mean, r.exact_payoff.mean, r.euler_payoff.se(), r.exact_payoff.se(),
                                 3.0, kFloor));

    // Closed forms.
    const auto a = analytic_price(m);
    if (a) {
        const double diff = r.euler_payoff.mean - a->price;
        if (a->approximate) {
            info("price_analytic_frozen_vol", std::nullopt, diff, r.euler_payoff.se());
        } else {
            check("price_analytic", std::nullopt, diff, r.euler_payoff.se(),
                  within_standard_errors(r.euler_payoff.mean, a->price, r.euler_payoff.se(), 0.0, 3.0, kFloor));
        }
        const double h = 1e-5 * a->forward;
        const double fd = (forward_call_price(a->forward + h, a->strike, a->vol) -
                           forward_call_price(a->forward - h, a->strike, a->vol)) /
                          (2.0 * h);
        const double delta = phi_terms(a->strike, a->forward, a->vol).plus;
        const double rel = std::abs(fd - delta) / std::max(std::abs(delta), kFloor);
        check("gradient_delta", std::nullopt, rel, 0.0, rel <= 1e-6 || std::abs(fd - delta) <= 1e-9);

        const DeltaStrategy d = delta_strategy(m.start, m.spec, effective_vol(m.vol, m.spec, &m.curve0));
        check("delta_eta", std::nullopt, d.eta, 0.0, std::abs(d.eta) <= kFloor);
    }

    // Clark-Ocone portfolio at the initial state.
    const NestedMcConfig inner = inner_config(c.run);
    const StrategyEstimate co = clark_ocone_strategy(m.start, m.spec, m.vol, inner, seeds.child(2));
    check("zero_eta", std::nullopt, co.eta, co.value_se, std::abs(co.eta) <= 3.0 * co.value_se + kFloor);
    const double hedged = hedge_value(m.start, co.phi, co.eta);
    check("hedge_value", std::nullopt, hedged - r.euler_payoff.mean, std::hypot(co.value_se, r.euler_payoff.se()),
          within_standard_errors(hedged, r.euler_payoff.mean, co.value_se, r.euler_payoff.se(), 3.0, kFloor));
    const auto support = m.spec.support();
    for (const auto& atom : co.phi.atoms()) {
        const bool on_support = std::any_of(support.begin(), support.end(),
                                            [&](double y) { return same_maturity(y, atom.maturity); });
        check("support", atom.maturity, atom.weight, 0.0, on_support);
    }
    if (m.spec.kind == InstrumentKind::bond_call || m.spec.kind == InstrumentKind::caplet) {
        const StrategyEstimate closed = instrument_strategy(m.start, m.spec, m.vol, inner, seeds.child(3));
        for (const auto& atom : co.phi.atoms()) {
            const double se = co.atom_se(atom.maturity);
            const double ref = closed.phi.weight_at(atom.maturity);
            check("coincidence", atom.maturity, atom.weight - ref, se,
                  within_standard_errors(atom.weight, ref, se, 0.0, 3.0, kFloor));
        }
    }

    // Clark-Ocone representation residual on the coarsest grid.
    NestedMcConfig residual_inner = inner;
    residual_inner.inner_paths = kMinInnerPaths;
    residual_inner.threads = 1;
    double price = r.euler_payoff.mean;
    double price_se = r.euler_payoff.se();
    if (a && !a->approximate) {
        price = a->price;
        price_se = 0.0;
    }
    ResidualConfig rc;
    rc.paths = c.run.residual_paths;
    rc.steps = {c.run.steps.front()};
    rc.seeds = seeds.child(4);
    rc.threads = c.run.threads;
    const auto res = co_representation_residual(m.start, m.spec, m.vol, price,
                                                nested_alpha_evaluator(m.spec, m.vol, residual_inner, seeds.child(5)),
                                                rc);
    const auto& row = res.rows.front();
    const double res_se = std::hypot(row.se, price_se);
    check("residual_mean", std::nullopt, row.mean, res_se, std::abs(row.mean) <= 3.0 * res_se + kFloor);
    info("residual_sd", std::nullopt, row.sd, 0.0);
    return t;
}

std::vector<std::string> failures(const Table& table) {
    std::vector<std::string> out;
    for (const auto& r : table.rows()) {
        if (r.status != "fail") continue;
        out.push_back(r.maturity ? r.quantity + "@" + format_number(*r.maturity) : r.quantity);
    }
    return out;
}

int run_command(const std::string& command, const ExperimentConfig& config, std::ostream& err) {
    Table table;
    if (command == "price") {
        table = price_table(config);
    } else if (command == "hedge") {
        table = hedge_table(config);
    } else if (command == "backtest") {
        table = backtest_table(config);
    } else if (command == "verify") {
        table = verify_table(config);
    } else {
        err << "unknown command '" << command << "'\n";
        return 2;
    }
    table.write(config.run.out, command + ".csv");
    const auto failed = failures(table);
    for (const auto& f : failed) err << "FAIL," << f << "\n";
    return failed.empty() ? 0 : 1;
}

}  // namespace curvehedge::cli
