#include "curvehedge/analytic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace curvehedge {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

GbmForwardModel GbmForwardModel::constant(double sigma, double x0) {
    GbmForwardModel m;
    m.factors = 1;
    m.sigma = [sigma](double) { return std::vector<double>{sigma}; };
    m.x0 = x0;
    return m;
}

double integrated_vol(const GbmForwardModel& model, double t, double T) {
    if (t > T) throw std::invalid_argument("integrated_vol requires t <= T");
    if (t == T) return 0.0;
    const double h = (T - t) / kIntegratedVolPoints;
    double sum = 0.0;
    for (int q = 0; q < kIntegratedVolPoints; ++q) {
        for (double s : model.sigma(t + (q + 0.5) * h)) sum += s * s;
    }
    return std::sqrt(sum * h);
}

PhiTerms phi_terms(double kappa, double x, double v) {
    if (!(x > 0.0)) throw std::domain_error("phi_terms requires a positive forward price");
    if (!(kappa > 0.0)) throw std::domain_error("phi_terms requires a positive strike");
    if (!(v >= 0.0)) throw std::domain_error("phi_terms requires a nonnegative integrated volatility");
    if (v == 0.0) {
        if (x > kappa) return {1.0, 1.0};
        if (x < kappa) return {0.0, 0.0};
        return {0.5, 0.5};
    }
    const double m = std::log(x / kappa) / v;
    return {normal_cdf(m + 0.5 * v), normal_cdf(m - 0.5 * v)};
}

double forward_call_price(double x, double kappa, double v) {
    if (kappa == 0.0) return x;
    const auto phi = phi_terms(kappa, x, v);
    return x * phi.plus - kappa * phi.minus;
}

double forward_put_price(double x, double kappa, double v) {
    const auto phi = phi_terms(kappa, x, v);
    return kappa * (1.0 - phi.minus) - x * (1.0 - phi.plus);
}

double margrabe_price(double x, double kappa, double numeraire_value, double asset_value, double v) {
    if (!(numeraire_value > 0.0)) throw std::domain_error("numeraire value must be positive");
    const double implied = asset_value / numeraire_value;
    if (std::abs(implied - x) > 1e-9 * std::max(std::abs(x), std::abs(implied))) {
        throw std::invalid_argument("forward price x must equal asset value / numeraire value");
    }
    if (kappa == 0.0) return asset_value;
    if (kappa < 0.0) throw std::domain_error("strike must be nonnegative");
    const auto phi = phi_terms(kappa, x, v);
    return asset_value * phi.plus - kappa * numeraire_value * phi.minus;
}

GbmForwardModel effective_vol(const VolSurface& vol, const InstrumentSpec& spec, const Curve* frozen) {
    GbmForwardModel model;
    model.factors = vol.factors();
    if (frozen != nullptr) model.x0 = measure_pair(*frozen, spec.mu) / measure_pair(*frozen, spec.nu);

    if (spec.kind == InstrumentKind::swaption) {
        if (frozen == nullptr) throw std::invalid_argument("swaption effective volatility needs a frozen curve");
        const TenorStructure& tenor = *spec.tenor;
        const auto tau = tenor.spacings();
        const double p_mu = measure_pair(*frozen, spec.mu);
        const double p_nu = measure_pair(*frozen, spec.nu);
        if (p_mu == 0.0) throw std::domain_error("swaption frozen volatility undefined for a zero floating leg");
        // Frozen weights of the swap-rate volatility.
        const double w_last = frozen->at(tenor.last()) / p_mu;
        std::vector<double> w_leg(tau.size());
        for (std::size_t k = 0; k < tau.size(); ++k) w_leg[k] = tau[k] * frozen->at(tenor.maturities[k + 1]) / p_nu;
        model.sigma = [vol, tenor, w_last, w_leg](double t) {
            const auto zi = vol(t, tenor.first());
            const auto zj = vol(t, tenor.last());
            std::vector<double> out(zi.size());
            for (std::size_t f = 0; f < out.size(); ++f) out[f] = w_last * (zi[f] - zj[f]);
            for (std::size_t k = 0; k < w_leg.size(); ++k) {
                const auto zk = vol(t, tenor.maturities[k + 1]);
                for (std::size_t f = 0; f < out.size(); ++f) out[f] += w_leg[k] * (zi[f] - zk[f]);
            }
            return out;
        };
        model.note = kFrozenVolNote;
        return model;
    }

    if (spec.mu.size() != 1 || spec.nu.size() != 1) {
        throw std::invalid_argument("effective volatility is only defined for single-atom mu and nu or swaptions");
    }
    const double asset = spec.mu.atoms().front().maturity;
    const double numeraire = spec.nu.atoms().front().maturity;
    model.sigma = [vol, asset, numeraire](double t) {
        auto za = vol(t, asset);
        const auto zn = vol(t, numeraire);
        for (std::size_t f = 0; f < za.size(); ++f) za[f] -= zn[f];
        return za;
    };
    return model;
}

}  // namespace curvehedge
