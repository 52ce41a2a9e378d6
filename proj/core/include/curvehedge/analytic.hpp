#pragma once

#include "curvehedge/instrument.hpp"
#include "curvehedge/market_model.hpp"
#include "curvehedge/simulation.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace curvehedge {

/// Midpoint sub-intervals used for v^2(t,T) = int_t^T |sigma^(s)|^2 ds.
inline constexpr int kIntegratedVolPoints = 64;

/// Standard normal CDF via the complementary error function (absolute error
/// well below 1e-15 over the real line).
double normal_cdf(double z);

/// Driftless geometric Brownian motion for the forward price X^ under the
/// forward measure: dX^_t = X^_t sigma^(t) dW^_t.
struct GbmForwardModel {
    std::size_t factors = 1;
    std::function<std::vector<double>(double)> sigma;
    double x0 = 1.0;
    /// Non-empty when the volatility is an approximation (swaption frozen vol).
    std::string note;

    static GbmForwardModel constant(double sigma, double x0 = 1.0);
};

/// v(t,T); throws std::invalid_argument when t > T.
double integrated_vol(const GbmForwardModel& model, double t, double T);

struct PhiTerms {
    double plus;
    double minus;
};

/// Phi(log(x/kappa)/v +- v/2). With v = 0 the indicator limits are returned:
/// (1,1) for x > kappa, (0,0) for x < kappa and (1/2,1/2) at the money.
/// Throws std::domain_error for nonpositive x or kappa or negative v.
PhiTerms phi_terms(double kappa, double x, double v);

/// Forward call price C^(t,x) = x Phi+ - kappa Phi-.
double forward_call_price(double x, double kappa, double v);
/// Forward put price kappa Phi(-d-) - x Phi(-d+).
double forward_put_price(double x, double kappa, double v);

/// Exchange-option value X_t Phi+ - kappa M_t Phi- for x = X_t / M_t.
/// Throws std::invalid_argument if x and X_t / M_t disagree beyond 1e-9 relative.
double margrabe_price(double x, double kappa, double numeraire_value, double asset_value, double v);

/// Volatility of X^ = P^(mu) implied by zeta:
///   single-atom mu and nu (bond option, caplet): zeta_t(mu atom) - zeta_t(nu atom);
///   swaption: swap-rate volatility with bond prices frozen at `frozen` (required),
///   flagged as a frozen-vol approximation.
/// When `frozen` is given, x0 is set to P(mu)/P(nu) on it.
GbmForwardModel effective_vol(const VolSurface& vol, const InstrumentSpec& spec, const Curve* frozen = nullptr);

inline constexpr const char* kFrozenVolNote = "frozen-vol approximation";

}  // namespace curvehedge
