#include "curvehedge/instrument.hpp"

#include <stdexcept>

namespace curvehedge {

Payoff Payoff::call(double strike) {
    Payoff p;
    p.kind_ = Kind::call;
    p.param_ = strike;
    return p;
}

Payoff Payoff::linear() { return Payoff(); }

Payoff Payoff::constant(double level) {
    Payoff p;
    p.kind_ = Kind::constant;
    p.param_ = level;
    p.lipschitz_ = 0.0;
    return p;
}

Payoff Payoff::custom(std::function<double(double)> value, std::function<double(double)> derivative,
                      double lipschitz) {
    if (!value || !derivative) throw std::invalid_argument("custom payoff needs a value and a derivative rule");
    if (!(lipschitz >= 0.0)) throw std::invalid_argument("payoff Lipschitz constant must be nonnegative");
    Payoff p;
    p.kind_ = Kind::custom;
    p.lipschitz_ = lipschitz;
    p.value_ = std::move(value);
    p.derivative_ = std::move(derivative);
    return p;
}

std::string to_string(InstrumentKind kind) {
    switch (kind) {
        case InstrumentKind::exchange: return "exchange";
        case InstrumentKind::bond_call: return "bond-call";
        case InstrumentKind::caplet: return "caplet";
        case InstrumentKind::swaption: return "swaption";
        case InstrumentKind::generic: return "generic";
    }
    return "unknown";
}

InstrumentKind parse_instrument_kind(const std::string& name) {
    if (name == "exchange") return InstrumentKind::exchange;
    if (name == "bond-call") return InstrumentKind::bond_call;
    if (name == "caplet") return InstrumentKind::caplet;
    if (name == "swaption") return InstrumentKind::swaption;
    if (name == "generic") return InstrumentKind::generic;
    throw std::invalid_argument("unknown instrument kind '" + name + "'");
}

InstrumentSpec InstrumentSpec::exchange(DiscreteMeasure mu, DiscreteMeasure nu, double exercise, double strike) {
    InstrumentSpec s;
    s.kind = InstrumentKind::exchange;
    s.mu = std::move(mu);
    s.nu = std::move(nu);
    s.exercise = exercise;
    s.settlement = exercise;
    s.strike = strike;
    s.validate();
    return s;
}

InstrumentSpec InstrumentSpec::bond_call(double exercise, double bond_maturity, double strike) {
    InstrumentSpec s;
    s.kind = InstrumentKind::bond_call;
    s.mu = DiscreteMeasure::dirac(bond_maturity);
    s.nu = DiscreteMeasure::dirac(exercise);
    s.exercise = exercise;
    s.settlement = exercise;
    s.strike = strike;
    s.validate();
    return s;
}

InstrumentSpec InstrumentSpec::caplet(double exercise, double settlement, double strike) {
    InstrumentSpec s;
    s.kind = InstrumentKind::caplet;
    s.mu = DiscreteMeasure::dirac(exercise);
    s.nu = DiscreteMeasure::dirac(settlement);
    s.exercise = exercise;
    s.settlement = settlement;
    s.strike = strike;
    s.validate();
    return s;
}

InstrumentSpec InstrumentSpec::swaption(TenorStructure tenor, double strike) {
    tenor.validate();
    InstrumentSpec s;
    s.kind = InstrumentKind::swaption;
    s.mu = swap_floating_leg(tenor);
    s.nu = swap_annuity(tenor);
    s.exercise = tenor.exercise;
    s.settlement = tenor.exercise;
    s.strike = strike;
    s.tenor = std::move(tenor);
    s.validate();
    return s;
}

InstrumentSpec InstrumentSpec::generic(DiscreteMeasure mu, DiscreteMeasure nu, double exercise, double settlement,
                                       Payoff payoff) {
    InstrumentSpec s;
    s.kind = InstrumentKind::generic;
    s.mu = std::move(mu);
    s.nu = std::move(nu);
    s.exercise = exercise;
    s.settlement = settlement;
    s.generic_payoff = std::move(payoff);
    s.validate();
    return s;
}

void InstrumentSpec::validate() const {
    if (mu.empty()) throw std::invalid_argument("instrument measure mu is empty");
    if (!nu.all_weights_positive()) throw std::invalid_argument("numeraire measure nu must have positive weights");
    if (!(exercise >= 0.0)) throw std::invalid_argument("exercise T must be nonnegative");
    if (!(settlement + kMaturityTolerance >= exercise)) throw std::invalid_argument("settlement S must not precede exercise T");
    for (const auto& m : {mu, nu}) {
        for (const auto& a : m.atoms()) {
            if (a.maturity + kMaturityTolerance < exercise) {
                throw std::invalid_argument("measure atoms must not mature before exercise T");
            }
        }
    }
    if (kind == InstrumentKind::generic && !generic_payoff) {
        throw std::invalid_argument("generic instrument needs a payoff");
    }
    if (kind == InstrumentKind::swaption && !tenor) throw std::invalid_argument("swaption needs a tenor structure");
    if (kind == InstrumentKind::caplet && !(settlement > exercise)) {
        throw std::invalid_argument("caplet needs T < S");
    }
}

double InstrumentSpec::effective_strike() const {
    if (kind == InstrumentKind::caplet) return 1.0 + strike * (settlement - exercise);
    return strike;
}

Payoff InstrumentSpec::payoff() const {
    if (kind == InstrumentKind::generic) return *generic_payoff;
    return Payoff::call(effective_strike());
}

std::vector<double> InstrumentSpec::support() const {
    auto s = mu.support();
    auto n = nu.support();
    s.insert(s.end(), n.begin(), n.end());
    return merge_maturities(std::move(s));
}

}  // namespace curvehedge
