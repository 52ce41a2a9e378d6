#include "curvehedge/malliavin.hpp"

#include "curvehedge/parallel.hpp"
#include "curvehedge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace curvehedge {

std::vector<double> sigma_hat_field(const ForwardCurve& curve, const VolSurface& vol, double t, double y) {
    const std::size_t d = vol.factors();
    const double p_y = curve.at(y);
    std::vector<double> zy(d), zz(d), out(d, 0.0);
    vol.eval(t, y, zy);
    for (const auto& a : curve.numeraire().atoms()) {
        vol.eval(t, a.maturity, zz);
        const double w = a.weight * curve.at(a.maturity);
        for (std::size_t f = 0; f < d; ++f) out[f] += w * (zy[f] - zz[f]);
    }
    for (auto& v : out) v *= p_y;
    return out;
}

std::vector<double> malliavin_derivative(const ForwardCurve& curve_u, const VolSurface& vol, double t, double y) {
    if (t > curve_u.time() + kMaturityTolerance) {
        throw std::invalid_argument("Malliavin derivative D_t P^_u needs t <= u");
    }
    return sigma_hat_field(curve_u, vol, t, y);
}

AlphaProcess alpha_process(const CurvePath& path, const InstrumentSpec& spec, const VolSurface& vol,
                           const NestedMcConfig& config, const SeedSpec& seeds) {
    if (config.inner_paths < kMinInnerPaths) throw std::invalid_argument("alpha_process needs at least 1000 inner paths");
    const TimeGrid grid(path.times);
    const std::size_t last = grid.index_of(spec.exercise);
    AlphaProcess out;
    for (std::size_t l = 0; l < last; ++l) {
        ClarkOconeMoments m = clark_ocone_moments(path.forward_curve(l), spec, vol, config, seeds.child(l), true);
        out.dates.push_back(path.times[l]);
        out.values.push_back(m.alpha);
        out.se.push_back(m.alpha_se);
        out.moments.push_back(std::move(m));
    }
    return out;
}

std::vector<double> alpha_from_portfolio(const ForwardCurve& state, const VolSurface& vol,
                                         const DiscreteMeasure& phi) {
    std::vector<double> out(vol.factors(), 0.0);
    for (const auto& a : phi.atoms()) {
        const auto s = sigma_hat_field(state, vol, state.time(), a.maturity);
        for (std::size_t f = 0; f < out.size(); ++f) out[f] += a.weight * s[f];
    }
    return out;
}

AlphaEvaluator nested_alpha_evaluator(const InstrumentSpec& spec, const VolSurface& vol, NestedMcConfig config,
                                      SeedSpec seeds) {
    return [spec, vol, config, seeds](const ForwardCurve& state, std::size_t path, std::size_t step,
                                      std::span<double> alpha) {
        const auto m = clark_ocone_moments(state, spec, vol, config, seeds.child(path, step), true);
        std::copy(m.alpha.begin(), m.alpha.end(), alpha.begin());
    };
}

namespace {

// xi^ - price - sum_l <alpha_l, dW_l> along one forward path ending at the exercise date.
double path_residual(const CurvePath& path, std::size_t path_index, double price, const AlphaEvaluator& alpha,
                     const Payoff& g, std::span<const NodeWeight> mu_nodes,
                     std::span<double> scratch) {
    const std::size_t last = path.steps();
    double integral = 0.0;
    for (std::size_t l = 0; l < last; ++l) {
        alpha(path.forward_curve(l), path_index, l, scratch);
        const auto dw = path.increment(l);
        for (std::size_t f = 0; f < dw.size(); ++f) integral += scratch[f] * dw[f];
    }
    return g(pair_nodes(mu_nodes, path.state(last))) - price - integral;
}

void check_ends_at_exercise(const CurvePath& path, const InstrumentSpec& spec) {
    if (std::abs(path.times.back() - spec.exercise) > kMaturityTolerance) {
        throw std::invalid_argument("residual paths must end at the exercise date");
    }
}

ResidualStats finish(const RunningStats& r, std::size_t steps, double dt) {
    return ResidualStats{steps, dt, r.count, r.mean, r.sd(), r.se()};
}

}  // namespace

ResidualStats co_representation_residual(std::span<const CurvePath> paths, const InstrumentSpec& spec, double price,
                                         const AlphaEvaluator& alpha) {
    if (paths.empty()) throw std::invalid_argument("residual needs at least one path");
    const Payoff g = spec.payoff();
    const auto mu_nodes = resolve_nodes(spec.mu, paths.front().maturities);
    std::vector<double> scratch(paths.front().factors);
    RunningStats r;
    for (std::size_t p = 0; p < paths.size(); ++p) {
        check_ends_at_exercise(paths[p], spec);
        r.add(path_residual(paths[p], p, price, alpha, g, mu_nodes, scratch));
    }
    const auto& first = paths.front();
    return finish(r, first.steps(), (first.times.back() - first.times.front()) / static_cast<double>(first.steps()));
}

ResidualRefinement co_representation_residual(const ForwardCurve& start, const InstrumentSpec& spec,
                                              const VolSurface& vol, double price, const AlphaEvaluator& alpha,
                                              const ResidualConfig& config) {
    if (config.paths == 0) throw std::invalid_argument("residual needs at least one path");
    if (config.steps.empty()) throw std::invalid_argument("residual needs at least one step count");
    if (!std::is_sorted(config.steps.begin(), config.steps.end()) || config.steps.front() == 0) {
        throw std::invalid_argument("residual step counts must be positive and increasing");
    }
    const double t0 = start.time();
    const double T = spec.exercise;
    const std::size_t finest = config.steps.back();
    const std::size_t levels = config.steps.size();
    const ForwardEulerSimulator fine(start, vol, TimeGrid::uniform(t0, T, finest));
    std::vector<ForwardEulerSimulator> sims;
    for (std::size_t n : config.steps) sims.emplace_back(start, vol, TimeGrid::uniform(t0, T, n));

    const Payoff g = spec.payoff();
    const auto mu_nodes = resolve_nodes(spec.mu, start.maturities());
    const std::size_t d = vol.factors();

    std::vector<std::vector<RunningStats>> partial(block_count(config.paths), std::vector<RunningStats>(levels));
    parallel_blocks(config.paths, config.threads, [&](std::size_t block, std::size_t begin, std::size_t end) {
        std::vector<double> fine_inc(finest * d), scratch(d);
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
                    sims[k].draw_increments(own, inc);
                }
                sims[k].evolve(inc, path);
                partial[block][k].add(path_residual(path, p, price, alpha, g, mu_nodes, scratch));
            }
        }
    });

    ResidualRefinement out;
    std::vector<double> log_dt, log_sd;
    bool all_positive = true;
    for (std::size_t k = 0; k < levels; ++k) {
        RunningStats total;
        for (const auto& b : partial) total.merge(b[k]);
        const double dt = (T - t0) / static_cast<double>(config.steps[k]);
        out.rows.push_back(finish(total, config.steps[k], dt));
        if (!(out.rows.back().sd > 0.0)) all_positive = false;
        log_dt.push_back(std::log(dt));
        log_sd.push_back(std::log(out.rows.back().sd));
    }
    out.slope = (all_positive && levels > 1) ? regression_slope(log_dt, log_sd)
                                             : std::numeric_limits<double>::quiet_NaN();
    return out;
}

BumpResult bump_check(const DiscountedSimulator& sim, std::span<const double> increments,
                      const DiscreteMeasure& nu, const VolSurface& vol, std::size_t step, std::size_t factor,
                      double y, double eps) {
    const std::size_t d = sim.factors();
    if (step >= sim.grid().steps() || factor >= d) throw std::invalid_argument("bump step or factor out of range");
    if (!(eps != 0.0)) throw std::invalid_argument("bump size must be nonzero");
    CurvePath base, bumped;
    sim.evolve(increments, base);
    std::vector<double> shifted(increments.begin(), increments.end());
    shifted[step * d + factor] += eps;
    sim.evolve(shifted, bumped);

    const std::size_t last = sim.grid().steps();
    const ForwardCurve p_base = forward_normalize(base.bond_curve(last), nu);
    const ForwardCurve p_bumped = forward_normalize(bumped.bond_curve(last), nu);

    BumpResult r;
    r.derivative = malliavin_derivative(p_base, vol, sim.grid().time(step), y)[factor];
    r.finite_difference = (p_bumped.at(y) - p_base.at(y)) / eps;
    const double scale = std::abs(r.derivative);
    r.relative_error = scale > 0.0 ? std::abs(r.finite_difference - r.derivative) / scale
                                   : std::abs(r.finite_difference - r.derivative);
    return r;
}

}  // namespace curvehedge
