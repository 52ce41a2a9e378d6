#include "curvehedge/hedging.hpp"

#include "curvehedge/parallel.hpp"
#include "curvehedge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace curvehedge {

TimeGrid inner_grid(double t, double horizon, double max_dt) {
    if (!(horizon > t)) throw std::invalid_argument("inner grid needs horizon > t");
    if (!(max_dt > 0.0)) throw std::invalid_argument("inner step bound must be positive");
    std::size_t steps = 1;
    if (std::isfinite(max_dt)) {
        steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((horizon - t) / max_dt - 1e-9)));
    }
    return TimeGrid::uniform(t, horizon, steps);
}

InnerEstimate inner_expectations(const ForwardCurve& state, double horizon, const VolSurface& vol,
                                 const NestedMcConfig& config, const SeedSpec& seeds, std::size_t channels,
                                 const InnerIntegrand& integrand) {
    if (config.inner_paths == 0) throw std::invalid_argument("inner path count must be positive");
    if (horizon < state.time() - kMaturityTolerance) {
        throw std::invalid_argument("conditional expectation horizon precedes the state date");
    }
    InnerEstimate est;
    est.mean.assign(channels, 0.0);
    est.se.assign(channels, 0.0);

    // At the horizon the conditional expectation is the integrand itself.
    if (horizon - state.time() <= kMaturityTolerance) {
        integrand(state.values(), est.mean);
        est.paths = config.inner_paths;
        return est;
    }

    const ForwardEulerSimulator sim(state, vol, inner_grid(state.time(), horizon, config.max_inner_dt));
    const std::size_t draws = config.antithetic ? (config.inner_paths + 1) / 2 : config.inner_paths;
    const std::size_t n = sim.nodes();
    const std::size_t increments = sim.grid().steps() * sim.factors();

    std::vector<ChannelStats> partial(block_count(draws), ChannelStats(channels));
    parallel_blocks(draws, config.threads, [&](std::size_t block, std::size_t begin, std::size_t end) {
        std::vector<double> inc(increments), terminal(n), out(channels), mirror(channels);
        ChannelSums sums(channels);
        for (std::size_t p = begin; p < end; ++p) {
            auto rng = seeds.stream(p);
            sim.draw_increments(rng, inc);
            sim.terminal(inc, terminal);
            integrand(terminal, out);
            if (config.antithetic) {
                for (auto& v : inc) v = -v;
                sim.terminal(inc, terminal);
                integrand(terminal, mirror);
                for (std::size_t c = 0; c < channels; ++c) out[c] = 0.5 * (out[c] + mirror[c]);
            }
            sums.add(out);
        }
        partial[block] = sums.stats();
    });
    ChannelStats total(channels);
    for (const auto& s : partial) total.merge(s);
    for (std::size_t c = 0; c < channels; ++c) {
        est.mean[c] = total[c].mean;
        est.se[c] = total[c].se();
    }
    est.paths = config.antithetic ? 2 * draws : draws;
    return est;
}

namespace {

// A zero strike means certain exercise.
PhiTerms call_terms(double kappa, double x, double v) {
    if (kappa == 0.0) return {1.0, 1.0};
    return phi_terms(kappa, x, v);
}

struct SupportLayout {
    std::vector<double> maturities;
    std::vector<std::size_t> nodes;
    std::vector<double> mu_weight;
    std::vector<double> nu_weight;
    std::vector<double> current;  // P^_t at each support atom
};

SupportLayout layout_support(const ForwardCurve& state, const InstrumentSpec& spec) {
    SupportLayout s;
    s.maturities = spec.support();
    for (double y : s.maturities) {
        const std::size_t node = state.index_of(y);
        const double p = state.values()[node];
        if (!(p > 0.0)) throw std::domain_error("forward bond price must be positive at every hedging maturity");
        s.nodes.push_back(node);
        s.mu_weight.push_back(spec.mu.weight_at(y));
        s.nu_weight.push_back(spec.nu.weight_at(y));
        s.current.push_back(p);
    }
    return s;
}

double pair_terminal(const SupportLayout& s, const std::vector<double>& weights, std::span<const double> terminal) {
    double x = 0.0;
    for (std::size_t a = 0; a < s.nodes.size(); ++a) x += weights[a] * terminal[s.nodes[a]];
    return x;
}

StrategyEstimate to_strategy(const SupportLayout& s, std::span<const double> phi, std::span<const double> phi_se,
                             double value, double value_se, std::size_t paths) {
    StrategyEstimate out;
    std::vector<Atom> atoms;
    for (std::size_t a = 0; a < s.maturities.size(); ++a) atoms.push_back({s.maturities[a], phi[a]});
    out.phi = DiscreteMeasure(std::move(atoms));
    out.se.assign(phi_se.begin(), phi_se.end());
    out.value = value;
    out.value_se = value_se;
    double held = 0.0;
    for (std::size_t a = 0; a < s.maturities.size(); ++a) held += phi[a] * s.current[a];
    out.eta = value - held;
    out.inner_paths = paths;
    return out;
}

}  // namespace

ClarkOconeMoments clark_ocone_moments(const ForwardCurve& state, const InstrumentSpec& spec, const VolSurface& vol,
                                      const NestedMcConfig& config, const SeedSpec& seeds, bool with_alpha) {
    const SupportLayout s = layout_support(state, spec);
    const std::size_t atoms = s.maturities.size();
    const std::size_t d = vol.factors();
    const Payoff g = spec.payoff();

    std::vector<double> zeta(atoms * d);
    for (std::size_t a = 0; a < atoms; ++a) {
        vol.eval(state.time(), s.maturities[a], std::span<double>(zeta.data() + a * d, d));
    }

    // Channels: phi per atom | value | eta | alpha terms (3 x d).
    const std::size_t value_ch = atoms;
    const std::size_t eta_ch = atoms + 1;
    const std::size_t alpha_ch = atoms + 2;
    const std::size_t channels = alpha_ch + (with_alpha ? 3 * d : 0);

    auto integrand = [&](std::span<const double> terminal, std::span<double> out) {
        const double x = pair_terminal(s, s.mu_weight, terminal);
        const double gx = g(x);
        const double dg = g.derivative(x);
        double residual = gx;
        for (std::size_t a = 0; a < atoms; ++a) {
            const double p_T = terminal[s.nodes[a]];
            const double coeff = s.mu_weight[a] * dg + s.nu_weight[a] * (gx - x * dg);
            out[a] = coeff * p_T / s.current[a];
            residual -= coeff * p_T;
        }
        out[value_ch] = gx;
        out[eta_ch] = residual;
        if (!with_alpha) return;
        double* t1 = out.data() + alpha_ch;
        double* t2 = t1 + d;
        double* t3 = t2 + d;
        std::fill(t1, t1 + 3 * d, 0.0);
        for (std::size_t a = 0; a < atoms; ++a) {
            const double p_T = terminal[s.nodes[a]];
            const double c1 = s.mu_weight[a] * dg * p_T;
            const double c2 = s.nu_weight[a] * x * dg * p_T;
            const double c3 = s.nu_weight[a] * gx * (p_T - s.current[a]);
            const double* z = zeta.data() + a * d;
            for (std::size_t f = 0; f < d; ++f) {
                t1[f] += c1 * z[f];
                t2[f] += c2 * z[f];
                t3[f] += c3 * z[f];
            }
        }
    };

    const InnerEstimate est = inner_expectations(state, spec.exercise, vol, config, seeds, channels, integrand);

    ClarkOconeMoments m;
    m.support = s.maturities;
    m.phi.assign(est.mean.begin(), est.mean.begin() + atoms);
    m.phi_se.assign(est.se.begin(), est.se.begin() + atoms);
    m.value = est.mean[value_ch];
    m.value_se = est.se[value_ch];
    m.eta = est.mean[eta_ch];
    m.eta_se = est.se[eta_ch];
    m.factors = d;
    m.paths = est.paths;
    if (with_alpha) {
        m.alpha.assign(d, 0.0);
        m.alpha_se.assign(d, 0.0);
        for (std::size_t k = 0; k < 3; ++k) {
            m.alpha_terms[k].assign(est.mean.begin() + alpha_ch + k * d, est.mean.begin() + alpha_ch + (k + 1) * d);
            m.alpha_terms_se[k].assign(est.se.begin() + alpha_ch + k * d, est.se.begin() + alpha_ch + (k + 1) * d);
        }
        for (std::size_t f = 0; f < d; ++f) {
            m.alpha[f] = m.alpha_terms[0][f] - m.alpha_terms[1][f] + m.alpha_terms[2][f];
            // Conservative: terms share paths, so their errors are not independent.
            m.alpha_se[f] = m.alpha_terms_se[0][f] + m.alpha_terms_se[1][f] + m.alpha_terms_se[2][f];
        }
    }
    return m;
}

double StrategyEstimate::atom_se(double maturity) const {
    const auto& atoms = phi.atoms();
    for (std::size_t a = 0; a < atoms.size(); ++a) {
        if (same_maturity(atoms[a].maturity, maturity)) return a < se.size() ? se[a] : 0.0;
    }
    throw LookupError(maturity);
}

StrategyEstimate clark_ocone_strategy(const ForwardCurve& state, const InstrumentSpec& spec, const VolSurface& vol,
                                      const NestedMcConfig& config, const SeedSpec& seeds) {
    if (config.inner_paths < kMinInnerPaths) {
        throw std::invalid_argument("Clark-Ocone strategy needs at least 1000 inner paths");
    }
    const ClarkOconeMoments m = clark_ocone_moments(state, spec, vol, config, seeds, false);
    const SupportLayout s = layout_support(state, spec);
    StrategyEstimate out = to_strategy(s, m.phi, m.phi_se, m.value, m.value_se, m.paths);
    // Keep the estimator's own eta channel (same paths), which carries its SE.
    out.eta = m.eta;
    out.eta_se = m.eta_se;
    return out;
}

StrategyEstimate instrument_strategy(const ForwardCurve& state, const InstrumentSpec& spec, const VolSurface& vol,
                                     const NestedMcConfig& config, const SeedSpec& seeds) {
    const SupportLayout s = layout_support(state, spec);
    const std::size_t atoms = s.maturities.size();
    const double kappa = spec.effective_strike();

    switch (spec.kind) {
        case InstrumentKind::generic:
            throw std::invalid_argument("generic payoffs have no specialized strategy; use clark_ocone_strategy");

        case InstrumentKind::bond_call:
        case InstrumentKind::caplet: {
            // mu = delta_A, nu = delta_N. Under the effective GBM for X^ = P^(A)/P^(N):
            //   E^[1{X^_T > kappa} X^_T | F_t] = X^_t Phi+,  E^[1{X^_T > kappa} | F_t] = Phi-.
            const double asset = spec.mu.atoms().front().maturity;
            const double numeraire = spec.nu.atoms().front().maturity;
            const double p_asset = state.at(asset);
            const double p_numeraire = state.at(numeraire);
            const double x = p_asset / p_numeraire;
            const double v = integrated_vol(effective_vol(vol, spec), state.time(), spec.exercise);
            const PhiTerms phi = call_terms(kappa, x, v);
            const double in_money_asset = x * phi.plus;
            const double in_money_prob = phi.minus;
            std::vector<double> weights(atoms, 0.0), se(atoms, 0.0);
            for (std::size_t a = 0; a < atoms; ++a) {
                if (same_maturity(s.maturities[a], asset)) {
                    weights[a] = (p_numeraire / p_asset) * in_money_asset;
                } else {
                    weights[a] = -kappa * in_money_prob;
                }
            }
            const double value = p_numeraire * (x * phi.plus - kappa * phi.minus);
            return to_strategy(s, weights, se, value, 0.0, 0);
        }

        case InstrumentKind::exchange:
        case InstrumentKind::swaption: {
            // Channels: E^[1{X^_T > kappa} P^_T(y) / P^_t(y)] per atom | payoff.
            const Payoff g = spec.payoff();
            auto integrand = [&](std::span<const double> terminal, std::span<double> out) {
                const double x = pair_terminal(s, s.mu_weight, terminal);
                const double in_money = x > kappa ? 1.0 : 0.0;
                for (std::size_t a = 0; a < atoms; ++a) {
                    out[a] = in_money * terminal[s.nodes[a]] / s.current[a];
                }
                out[atoms] = g(x);
            };
            const InnerEstimate est = inner_expectations(state, spec.exercise, vol, config, seeds, atoms + 1, integrand);

            std::vector<double> coeff(atoms, 0.0);
            if (spec.kind == InstrumentKind::exchange) {
                for (std::size_t a = 0; a < atoms; ++a) coeff[a] = s.mu_weight[a] - kappa * s.nu_weight[a];
            } else {
                const TenorStructure& tenor = *spec.tenor;
                const auto tau = tenor.spacings();
                const std::size_t last = tenor.maturities.size() - 1;
                for (std::size_t a = 0; a < atoms; ++a) {
                    const double y = s.maturities[a];
                    if (same_maturity(y, tenor.first())) {
                        coeff[a] = 1.0;
                    } else if (same_maturity(y, tenor.last())) {
                        coeff[a] = -(1.0 + kappa * tau[last - 1]);
                    } else {
                        for (std::size_t k = 1; k < last; ++k) {
                            if (same_maturity(y, tenor.maturities[k])) coeff[a] = -kappa * tau[k - 1];
                        }
                    }
                }
            }
            std::vector<double> weights(atoms), se(atoms);
            for (std::size_t a = 0; a < atoms; ++a) {
                weights[a] = coeff[a] * est.mean[a];
                se[a] = std::abs(coeff[a]) * est.se[a];
            }
            StrategyEstimate out = to_strategy(s, weights, se, est.mean[atoms], est.se[atoms], est.paths);
            out.eta_se = est.se[atoms];
            return out;
        }
    }
    throw std::invalid_argument("unsupported instrument kind");
}

namespace {

double gbm_mc_price(const Payoff& g, double x, double v, std::span<const double> normals) {
    double sum = 0.0;
    for (double z : normals) sum += g(x * std::exp(v * z - 0.5 * v * v));
    return sum / static_cast<double>(normals.size());
}

DiscreteMeasure swaption_delta_measure(const TenorStructure& tenor, double kappa, const PhiTerms& phi) {
    const auto tau = tenor.spacings();
    const std::size_t last = tenor.maturities.size() - 1;
    std::vector<Atom> atoms;
    atoms.push_back({tenor.first(), phi.plus});
    for (std::size_t k = 1; k < last; ++k) atoms.push_back({tenor.maturities[k], -kappa * phi.minus * tau[k - 1]});
    atoms.push_back({tenor.last(), -(phi.plus + kappa * tau[last - 1] * phi.minus)});
    return DiscreteMeasure(std::move(atoms));
}

}  // namespace

DeltaStrategy delta_strategy(const ForwardCurve& state, const InstrumentSpec& spec, const GbmForwardModel& model,
                             const GbmMcConfig& mc) {
    DeltaStrategy out;
    out.forward = measure_pair(state, spec.mu) / measure_pair(state, spec.nu);
    out.vol = integrated_vol(model, state.time(), spec.exercise);
    const double x = out.forward;

    if (spec.is_call()) {
        const double kappa = spec.effective_strike();
        const PhiTerms phi = call_terms(kappa, x, out.vol);
        out.delta = phi.plus;
        out.price = x * phi.plus - kappa * phi.minus;
        if (spec.kind == InstrumentKind::swaption) {
            out.phi = swaption_delta_measure(*spec.tenor, kappa, phi);
        } else {
            out.phi = spec.mu.scaled(phi.plus) - spec.nu.scaled(kappa * phi.minus);
        }
    } else {
        const Payoff g = spec.payoff();
        std::vector<double> normals(out.vol > 0.0 ? mc.paths : 1, 0.0);
        if (out.vol > 0.0) {
            auto rng = mc.seeds.stream(0);
            std::normal_distribution<double> normal;
            for (auto& z : normals) z = normal(rng);
        }
        const double h = 1e-4 * x;
        out.price = gbm_mc_price(g, x, out.vol, normals);
        out.delta = (gbm_mc_price(g, x + h, out.vol, normals) - gbm_mc_price(g, x - h, out.vol, normals)) / (2.0 * h);
        out.phi = spec.mu.scaled(out.delta) + spec.nu.scaled(out.price - x * out.delta);
    }
    out.eta = out.price - measure_pair(state, out.phi) / measure_pair(state, spec.nu);
    return out;
}

double TwoAssetPortfolio::value(const Curve& curve) const {
    double v = 0.0;
    for (const auto& a : asset.atoms()) v += asset_units * a.weight * curve.at(a.maturity);
    for (const auto& a : numeraire.atoms()) v += numeraire_units * a.weight * curve.at(a.maturity);
    return v;
}

DiscreteMeasure TwoAssetPortfolio::as_measure() const {
    return asset.scaled(asset_units) + numeraire.scaled(numeraire_units);
}

TwoAssetPortfolio jamshidian_strategy(const ForwardCurve& state, const InstrumentSpec& spec,
                                      const GbmForwardModel& model) {
    if (spec.kind != InstrumentKind::swaption) throw std::invalid_argument("jamshidian_strategy needs a swaption");
    const double x = measure_pair(state, spec.mu) / measure_pair(state, spec.nu);
    const double v = integrated_vol(model, state.time(), spec.exercise);
    const PhiTerms phi = call_terms(spec.strike, x, v);
    return TwoAssetPortfolio{phi.plus, spec.mu, -spec.strike * phi.minus, spec.nu};
}

double hedge_value(const ForwardCurve& state, const DiscreteMeasure& phi, double eta) {
    return measure_pair(state, phi) + eta;
}

}  // namespace curvehedge
