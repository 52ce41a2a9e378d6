#pragma once

#include "curvehedge/market_model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace curvehedge {

/// Forward payoff g^ applied to X^_T = P^_T(mu), with the derivative rule used
/// by the hedging formulas. At a call kink the derivative is the left-closed
/// subgradient 1_{x > strike}.
class Payoff {
public:
    enum class Kind { call, linear, constant, custom };

    static Payoff call(double strike);
    static Payoff linear();
    static Payoff constant(double level);
    static Payoff custom(std::function<double(double)> value, std::function<double(double)> derivative,
                         double lipschitz);

    Kind kind() const { return kind_; }
    double strike() const { return param_; }   // call
    double level() const { return param_; }    // constant
    double lipschitz() const { return lipschitz_; }

    double operator()(double x) const {
        switch (kind_) {
            case Kind::call: return x > param_ ? x - param_ : 0.0;
            case Kind::linear: return x;
            case Kind::constant: return param_;
            case Kind::custom: return value_(x);
        }
        return 0.0;
    }

    double derivative(double x) const {
        switch (kind_) {
            case Kind::call: return x > param_ ? 1.0 : 0.0;
            case Kind::linear: return 1.0;
            case Kind::constant: return 0.0;
            case Kind::custom: return derivative_(x);
        }
        return 0.0;
    }

private:
    Kind kind_ = Kind::linear;
    double param_ = 0.0;
    double lipschitz_ = 1.0;
    std::function<double(double)> value_;
    std::function<double(double)> derivative_;
};

enum class InstrumentKind { exchange, bond_call, caplet, swaption, generic };

std::string to_string(InstrumentKind kind);
InstrumentKind parse_instrument_kind(const std::string& name);

/// Claim xi = P_S(nu) g^(P_T(mu) / P_T(nu)) with exercise T and settlement S.
struct InstrumentSpec {
    InstrumentKind kind = InstrumentKind::generic;
    DiscreteMeasure mu;
    DiscreteMeasure nu;
    double exercise = 0.0;
    double settlement = 0.0;
    /// Price strike for exchange/bond-call/swaption; the LIBOR strike for caplets.
    double strike = 0.0;
    std::optional<TenorStructure> tenor;       // swaption only
    std::optional<Payoff> generic_payoff;      // generic only

    /// (P_T(mu) - strike * P_T(nu))^+ with S = T.
    static InstrumentSpec exchange(DiscreteMeasure mu, DiscreteMeasure nu, double exercise, double strike);
    /// (P_T(U) - strike)^+: mu = delta_U, nu = delta_T.
    static InstrumentSpec bond_call(double exercise, double bond_maturity, double strike);
    /// (S-T)(L(T,T,S) - strike)^+: mu = delta_T, nu = delta_S.
    static InstrumentSpec caplet(double exercise, double settlement, double strike);
    /// (P_T(T_i) - P_T(T_j) - strike P_T(nu))^+ with the annuity numeraire.
    static InstrumentSpec swaption(TenorStructure tenor, double strike);
    static InstrumentSpec generic(DiscreteMeasure mu, DiscreteMeasure nu, double exercise, double settlement,
                                  Payoff payoff);

    /// Throws std::invalid_argument describing the first violated invariant.
    void validate() const;

    /// Strike applied to X^_T: 1 + strike (S - T) for caplets, strike otherwise.
    double effective_strike() const;
    Payoff payoff() const;
    /// Sorted support(mu) U support(nu).
    std::vector<double> support() const;
    bool is_call() const { return kind != InstrumentKind::generic; }
};

}  // namespace curvehedge
