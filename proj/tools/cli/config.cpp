#include "config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace curvehedge::cli {

using json = nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& lines) {
    std::string s = "invalid configuration:";
    for (const auto& l : lines) s += "\n  " + l;
    return s;
}

// Line and column (both 1-based) of a byte offset.
std::pair<std::size_t, std::size_t> locate(const std::string& text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

class Reader {
public:
    explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

    void fail(const std::string& path, const std::string& what) { errors_.push_back(path + ": " + what); }

    bool object(const json& j, const std::string& path, const std::set<std::string>& allowed) {
        if (!j.is_object()) {
            fail(path, "expected an object");
            return false;
        }
        for (const auto& [key, _] : j.items()) {
            if (!allowed.count(key)) fail(path + "." + key, "unknown key");
        }
        return true;
    }

    std::optional<double> number(const json& obj, const std::string& key, const std::string& path, bool required) {
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (required) fail(path + "." + key, "missing required number");
            return std::nullopt;
        }
        if (!it->is_number()) {
            fail(path + "." + key, "expected a number");
            return std::nullopt;
        }
        const double v = it->get<double>();
        if (!std::isfinite(v)) {
            fail(path + "." + key, "must be finite");
            return std::nullopt;
        }
        return v;
    }

    std::optional<std::uint64_t> count(const json& obj, const std::string& key, const std::string& path) {
        auto it = obj.find(key);
        if (it == obj.end()) return std::nullopt;
        if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
            fail(path + "." + key, "expected a nonnegative integer");
            return std::nullopt;
        }
        return it->get<std::uint64_t>();
    }

    std::optional<std::string> string(const json& obj, const std::string& key, const std::string& path,
                                      bool required) {
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (required) fail(path + "." + key, "missing required string");
            return std::nullopt;
        }
        if (!it->is_string()) {
            fail(path + "." + key, "expected a string");
            return std::nullopt;
        }
        return it->get<std::string>();
    }

    std::vector<double> numbers(const json& obj, const std::string& key, const std::string& path, bool required) {
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (required) fail(path + "." + key, "missing required array of numbers");
            return {};
        }
        return numbers_of(*it, path + "." + key);
    }

    std::vector<double> numbers_of(const json& j, const std::string& path) {
        std::vector<double> out;
        if (!j.is_array()) {
            fail(path, "expected an array of numbers");
            return out;
        }
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (!j[i].is_number() || !std::isfinite(j[i].get<double>())) {
                fail(path + "[" + std::to_string(i) + "]", "expected a finite number");
                continue;
            }
            out.push_back(j[i].get<double>());
        }
        return out;
    }

    std::vector<std::pair<double, double>> pairs(const json& obj, const std::string& key, const std::string& path,
                                                 bool required) {
        std::vector<std::pair<double, double>> out;
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (required) fail(path + "." + key, "missing required array of [maturity, value] pairs");
            return out;
        }
        if (!it->is_array()) {
            fail(path + "." + key, "expected an array of [maturity, value] pairs");
            return out;
        }
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto v = numbers_of((*it)[i], path + "." + key + "[" + std::to_string(i) + "]");
            if (v.size() != 2) {
                fail(path + "." + key + "[" + std::to_string(i) + "]", "expected [maturity, value]");
                continue;
            }
            out.emplace_back(v[0], v[1]);
        }
        return out;
    }

private:
    std::vector<std::string>& errors_;
};

std::vector<Atom> to_atoms(const std::vector<std::pair<double, double>>& p) {
    std::vector<Atom> out;
    for (const auto& [m, w] : p) out.push_back({m, w});
    return out;
}

json atoms_json(const std::vector<Atom>& atoms) {
    json a = json::array();
    for (const auto& x : atoms) a.push_back({x.maturity, x.weight});
    return a;
}

StrategyKind parse_strategy(Reader& r, const std::string& name) {
    try {
        return parse_strategy_kind(name);
    } catch (const std::invalid_argument&) {
        r.fail("run.strategy", "expected one of delta, clark-ocone, instrument");
        return StrategyKind::delta;
    }
}

BacktestWorld parse_world(Reader& r, const std::string& name) {
    if (name == "curve") return BacktestWorld::curve;
    if (name == "gbm") return BacktestWorld::gbm;
    r.fail("run.world", "expected curve or gbm");
    return BacktestWorld::curve;
}

void read_market(Reader& r, const json& j, MarketConfig& m) {
    if (!r.object(j, "market", {"time", "curve", "shortRate"})) return;
    if (auto v = r.number(j, "time", "market", false)) m.time = *v;
    if (auto v = r.number(j, "shortRate", "market", false)) m.short_rate = *v;
    m.curve = r.pairs(j, "curve", "market", true);
}

void read_vol(Reader& r, const json& j, VolConfig& v) {
    if (!r.object(j, "vol", {"family", "factors", "levels", "betas", "sigmas", "speeds", "maturities"})) return;
    if (auto f = r.string(j, "family", "vol", true)) {
        try {
            v.family = parse_vol_family(*f);
        } catch (const std::invalid_argument&) {
            r.fail("vol.family", "expected one of constant, ho-lee, vasicek, piecewise");
        }
    }
    if (auto n = r.count(j, "factors", "vol")) v.factors = *n;
    switch (v.family) {
        case VolFamily::constant: v.levels = r.numbers(j, "levels", "vol", true); break;
        case VolFamily::ho_lee: v.betas = r.numbers(j, "betas", "vol", true); break;
        case VolFamily::vasicek:
            v.sigmas = r.numbers(j, "sigmas", "vol", true);
            v.speeds = r.numbers(j, "speeds", "vol", true);
            break;
        case VolFamily::piecewise: {
            v.maturities = r.numbers(j, "maturities", "vol", true);
            auto it = j.find("levels");
            if (it == j.end() || !it->is_array()) {
                r.fail("vol.levels", "piecewise volatility needs an array of level vectors");
                break;
            }
            for (std::size_t k = 0; k < it->size(); ++k) {
                v.piecewise_levels.push_back(r.numbers_of((*it)[k], "vol.levels[" + std::to_string(k) + "]"));
            }
            break;
        }
    }
}

void read_instrument(Reader& r, const json& j, InstrumentConfig& in) {
    if (!r.object(j, "instrument",
                  {"kind", "exercise", "settlement", "strike", "bondMaturity", "tenor", "mu", "nu", "payoff"})) {
        return;
    }
    if (auto k = r.string(j, "kind", "instrument", true)) {
        try {
            in.kind = parse_instrument_kind(*k);
        } catch (const std::invalid_argument&) {
            r.fail("instrument.kind", "expected one of exchange, bond-call, caplet, swaption, generic");
        }
    }
    if (auto v = r.number(j, "exercise", "instrument", true)) in.exercise = *v;
    const bool needs_strike = in.kind != InstrumentKind::generic;
    if (auto v = r.number(j, "strike", "instrument", needs_strike)) in.strike = *v;
    in.settlement = in.exercise;
    switch (in.kind) {
        case InstrumentKind::bond_call:
            if (auto v = r.number(j, "bondMaturity", "instrument", true)) in.bond_maturity = *v;
            break;
        case InstrumentKind::caplet:
            if (auto v = r.number(j, "settlement", "instrument", true)) in.settlement = *v;
            break;
        case InstrumentKind::swaption: in.tenor = r.numbers(j, "tenor", "instrument", true); break;
        case InstrumentKind::exchange:
            in.mu = to_atoms(r.pairs(j, "mu", "instrument", true));
            in.nu = to_atoms(r.pairs(j, "nu", "instrument", true));
            break;
        case InstrumentKind::generic: {
            in.mu = to_atoms(r.pairs(j, "mu", "instrument", true));
            in.nu = to_atoms(r.pairs(j, "nu", "instrument", true));
            if (auto v = r.number(j, "settlement", "instrument", false)) in.settlement = *v;
            auto it = j.find("payoff");
            if (it == j.end()) {
                r.fail("instrument.payoff", "generic instruments need a payoff");
                break;
            }
            if (!r.object(*it, "instrument.payoff", {"type", "strike", "level"})) break;
            if (auto t = r.string(*it, "type", "instrument.payoff", true)) in.payoff.type = *t;
            if (auto v = r.number(*it, "strike", "instrument.payoff", in.payoff.type == "call")) in.payoff.strike = *v;
            if (auto v = r.number(*it, "level", "instrument.payoff", in.payoff.type == "constant")) in.payoff.level = *v;
            break;
        }
    }
}

void read_run(Reader& r, const json& j, RunConfig& run) {
    if (!r.object(j, "run",
                  {"paths", "innerPaths", "steps", "seed", "out", "threads", "strategy", "world", "rebalanceEvery",
                   "maxInnerDt", "residualPaths"})) {
        return;
    }
    if (auto v = r.count(j, "paths", "run")) run.paths = *v;
    if (auto v = r.count(j, "innerPaths", "run")) run.inner_paths = *v;
    if (auto v = r.count(j, "seed", "run")) run.seed = *v;
    if (auto v = r.count(j, "threads", "run")) run.threads = *v;
    if (auto v = r.count(j, "rebalanceEvery", "run")) run.rebalance_every = *v;
    if (auto v = r.count(j, "residualPaths", "run")) run.residual_paths = *v;
    if (auto v = r.number(j, "maxInnerDt", "run", false)) run.max_inner_dt = *v;
    if (auto v = r.string(j, "out", "run", false)) run.out = *v;
    if (auto v = r.string(j, "strategy", "run", false)) run.strategy = parse_strategy(r, *v);
    if (auto v = r.string(j, "world", "run", false)) run.world = parse_world(r, *v);
    if (j.contains("steps")) {
        run.steps.clear();
        for (double s : r.numbers(j, "steps", "run", true)) {
            if (s < 1 || s != std::floor(s)) {
                r.fail("run.steps", "step counts must be positive integers");
                continue;
            }
            run.steps.push_back(static_cast<std::size_t>(s));
        }
    }
}

bool in_curve(const MarketConfig& m, double maturity) {
    return std::any_of(m.curve.begin(), m.curve.end(), [&](const auto& p) { return same_maturity(p.first, maturity); });
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

std::string to_string(BacktestWorld world) { return world == BacktestWorld::gbm ? "gbm" : "curve"; }

std::vector<std::string> validate(const ExperimentConfig& c) {
    std::vector<std::string> errs;
    const auto& m = c.market;
    if (m.curve.empty()) errs.push_back("market.curve: needs at least one (maturity, price) point");
    for (std::size_t i = 0; i < m.curve.size(); ++i) {
        const auto& [y, p] = m.curve[i];
        const std::string where = "market.curve[" + std::to_string(i) + "]";
        if (!(p > 0.0)) errs.push_back(where + ": bond price must be positive");
        if (y < m.time - kMaturityTolerance) errs.push_back(where + ": maturity precedes market.time");
        if (i > 0 && !(y > m.curve[i - 1].first)) errs.push_back(where + ": maturities must be strictly increasing");
    }

    const auto& v = c.vol;
    auto sized = [&](const std::vector<double>& x, const char* name) {
        if (x.size() != v.factors) {
            errs.push_back(std::string("vol.") + name + ": expected " + std::to_string(v.factors) + " values (one per factor)");
        }
    };
    if (v.factors == 0) errs.push_back("vol.factors: must be at least 1");
    switch (v.family) {
        case VolFamily::constant: sized(v.levels, "levels"); break;
        case VolFamily::ho_lee: sized(v.betas, "betas"); break;
        case VolFamily::vasicek:
            sized(v.sigmas, "sigmas");
            sized(v.speeds, "speeds");
            for (double a : v.speeds) {
                if (!(a > 0.0)) errs.push_back("vol.speeds: mean-reversion speeds must be positive");
            }
            break;
        case VolFamily::piecewise:
            if (v.maturities.empty() || v.maturities.size() != v.piecewise_levels.size()) {
                errs.push_back("vol.levels: piecewise volatility needs one level vector per maturity");
            }
            for (std::size_t k = 0; k < v.piecewise_levels.size(); ++k) {
                if (v.piecewise_levels[k].size() != v.factors) {
                    errs.push_back("vol.levels[" + std::to_string(k) + "]: expected one value per factor");
                }
            }
            for (std::size_t k = 1; k < v.maturities.size(); ++k) {
                if (!(v.maturities[k] > v.maturities[k - 1])) {
                    errs.push_back("vol.maturities: must be strictly increasing");
                    break;
                }
            }
            break;
    }

    const auto& in = c.instrument;
    std::vector<double> referenced;
    if (in.exercise < m.time - kMaturityTolerance) errs.push_back("instrument.exercise: precedes market.time");
    switch (in.kind) {
        case InstrumentKind::bond_call:
            if (!(in.bond_maturity > in.exercise)) errs.push_back("instrument.bondMaturity: must be after exercise");
            referenced = {in.exercise, in.bond_maturity};
            break;
        case InstrumentKind::caplet:
            if (!(in.settlement > in.exercise)) errs.push_back("instrument.settlement: caplet needs exercise < settlement");
            referenced = {in.exercise, in.settlement};
            break;
        case InstrumentKind::swaption: {
            if (in.tenor.size() < 2) errs.push_back("instrument.tenor: needs at least two dates");
            try {
                if (in.tenor.size() >= 2) TenorStructure::make(in.tenor, in.exercise, in.exercise);
            } catch (const std::invalid_argument& e) {
                errs.push_back(std::string("instrument.tenor: ") + e.what());
            }
            referenced = in.tenor;
            break;
        }
        case InstrumentKind::exchange:
        case InstrumentKind::generic:
            if (in.mu.empty()) errs.push_back("instrument.mu: needs at least one atom");
            if (in.nu.empty()) errs.push_back("instrument.nu: needs at least one atom");
            for (const auto& a : in.nu) {
                if (!(a.weight > 0.0)) errs.push_back("instrument.nu: weights must be positive");
            }
            for (const auto* side : {&in.mu, &in.nu}) {
                for (const auto& a : *side) {
                    referenced.push_back(a.maturity);
                    if (a.maturity < in.exercise - kMaturityTolerance) {
                        errs.push_back("instrument: measure atoms must not mature before exercise");
                    }
                }
            }
            if (in.kind == InstrumentKind::generic) {
                const auto& t = in.payoff.type;
                if (t != "call" && t != "linear" && t != "constant") {
                    errs.push_back("instrument.payoff.type: expected call, linear or constant");
                }
                if (in.settlement < in.exercise - kMaturityTolerance) {
                    errs.push_back("instrument.settlement: must not precede exercise");
                }
            }
            break;
    }
    if (in.kind != InstrumentKind::generic && in.kind != InstrumentKind::caplet && in.strike < 0.0) {
        errs.push_back("instrument.strike: must be nonnegative");
    }
    for (double y : referenced) {
        if (!in_curve(m, y)) errs.push_back("instrument: maturity " + fmt(y) + " is not a node of market.curve");
    }

    const auto& r = c.run;
    if (r.paths == 0) errs.push_back("run.paths: must be positive");
    if (r.inner_paths < kMinInnerPaths) errs.push_back("run.innerPaths: must be at least 1000");
    if (r.residual_paths == 0) errs.push_back("run.residualPaths: must be positive");
    if (r.steps.empty()) errs.push_back("run.steps: needs at least one step count");
    for (std::size_t k = 1; k < r.steps.size(); ++k) {
        if (!(r.steps[k] > r.steps[k - 1])) {
            errs.push_back("run.steps: must be strictly increasing");
            break;
        }
    }
    if (r.rebalance_every == 0) errs.push_back("run.rebalanceEvery: must be positive");
    if (!(r.max_inner_dt > 0.0)) errs.push_back("run.maxInnerDt: must be positive");
    if (!(in.exercise > m.time)) errs.push_back("instrument.exercise: must be after market.time");
    return errs;
}

ExperimentConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = locate(text, e.byte == 0 ? 0 : e.byte - 1);
        std::ostringstream os;
        os << "syntax error at line " << line << ", column " << col << ": " << e.what();
        throw ConfigError({os.str()});
    }
    std::vector<std::string> errs;
    Reader r(errs);
    ExperimentConfig c;
    if (r.object(doc, "config", {"market", "vol", "instrument", "run"})) {
        if (doc.contains("market")) read_market(r, doc["market"], c.market); else r.fail("config.market", "missing");
        if (doc.contains("vol")) read_vol(r, doc["vol"], c.vol); else r.fail("config.vol", "missing");
        if (doc.contains("instrument")) read_instrument(r, doc["instrument"], c.instrument);
        else r.fail("config.instrument", "missing");
        if (doc.contains("run")) read_run(r, doc["run"], c.run);
    }
    for (auto& e : validate(c)) {
        if (std::find(errs.begin(), errs.end(), e) == errs.end()) errs.push_back(std::move(e));
    }
    if (!errs.empty()) throw ConfigError(errs);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str());
}

namespace {

json to_json(const ExperimentConfig& c, bool for_hash) {
    json market = {{"time", c.market.time}, {"shortRate", c.market.short_rate}, {"curve", json::array()}};
    for (const auto& [y, p] : c.market.curve) market["curve"].push_back({y, p});

    json vol = {{"family", to_string(c.vol.family)}, {"factors", c.vol.factors}};
    switch (c.vol.family) {
        case VolFamily::constant: vol["levels"] = c.vol.levels; break;
        case VolFamily::ho_lee: vol["betas"] = c.vol.betas; break;
        case VolFamily::vasicek:
            vol["sigmas"] = c.vol.sigmas;
            vol["speeds"] = c.vol.speeds;
            break;
        case VolFamily::piecewise:
            vol["maturities"] = c.vol.maturities;
            vol["levels"] = c.vol.piecewise_levels;
            break;
    }

    const auto& in = c.instrument;
    json inst = {{"kind", to_string(in.kind)}, {"exercise", in.exercise}};
    switch (in.kind) {
        case InstrumentKind::bond_call:
            inst["bondMaturity"] = in.bond_maturity;
            inst["strike"] = in.strike;
            break;
        case InstrumentKind::caplet:
            inst["settlement"] = in.settlement;
            inst["strike"] = in.strike;
            break;
        case InstrumentKind::swaption:
            inst["tenor"] = in.tenor;
            inst["strike"] = in.strike;
            break;
        case InstrumentKind::exchange:
            inst["mu"] = atoms_json(in.mu);
            inst["nu"] = atoms_json(in.nu);
            inst["strike"] = in.strike;
            break;
        case InstrumentKind::generic: {
            inst["mu"] = atoms_json(in.mu);
            inst["nu"] = atoms_json(in.nu);
            inst["settlement"] = in.settlement;
            json payoff = {{"type", in.payoff.type}};
            if (in.payoff.type == "call") payoff["strike"] = in.payoff.strike;
            if (in.payoff.type == "constant") payoff["level"] = in.payoff.level;
            inst["payoff"] = payoff;
            break;
        }
    }

    const auto& r = c.run;
    json run = {{"paths", r.paths},
                {"innerPaths", r.inner_paths},
                {"steps", r.steps},
                {"seed", r.seed},
                {"strategy", to_string(r.strategy)},
                {"world", to_string(r.world)},
                {"rebalanceEvery", r.rebalance_every},
                {"maxInnerDt", r.max_inner_dt},
                {"residualPaths", r.residual_paths}};
    if (!for_hash) {
        run["out"] = r.out;
        run["threads"] = r.threads;
    }
    return {{"market", market}, {"vol", vol}, {"instrument", inst}, {"run", run}};
}

}  // namespace

std::string emit_config(const ExperimentConfig& config) { return to_json(config, false).dump(2) + "\n"; }

std::string config_hash(const ExperimentConfig& config) {
    const std::string text = to_json(config, true).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

VolSurface build_vol(const VolConfig& v) {
    switch (v.family) {
        case VolFamily::constant: return VolSurface::constant(v.levels);
        case VolFamily::ho_lee: return VolSurface::ho_lee(v.betas);
        case VolFamily::vasicek: return VolSurface::vasicek(v.sigmas, v.speeds);
        case VolFamily::piecewise: return VolSurface::piecewise(v.maturities, v.piecewise_levels);
    }
    throw std::invalid_argument("unknown volatility family");
}

Payoff build_payoff(const PayoffConfig& p) {
    if (p.type == "call") return Payoff::call(p.strike);
    if (p.type == "constant") return Payoff::constant(p.level);
    return Payoff::linear();
}

InstrumentSpec build_spec(const InstrumentConfig& in) {
    switch (in.kind) {
        case InstrumentKind::bond_call: return InstrumentSpec::bond_call(in.exercise, in.bond_maturity, in.strike);
        case InstrumentKind::caplet: return InstrumentSpec::caplet(in.exercise, in.settlement, in.strike);
        case InstrumentKind::swaption:
            return InstrumentSpec::swaption(TenorStructure::make(in.tenor, in.exercise, in.exercise), in.strike);
        case InstrumentKind::exchange:
            return InstrumentSpec::exchange(DiscreteMeasure(in.mu), DiscreteMeasure(in.nu), in.exercise, in.strike);
        case InstrumentKind::generic:
            return InstrumentSpec::generic(DiscreteMeasure(in.mu), DiscreteMeasure(in.nu), in.exercise, in.settlement,
                                           build_payoff(in.payoff));
    }
    throw std::invalid_argument("unknown instrument kind");
}

}  // namespace

Model build_model(const ExperimentConfig& config) {
    auto errs = validate(config);
    if (!errs.empty()) throw ConfigError(errs);
    BondCurve curve0 = BondCurve::from_points(config.market.time, config.market.curve);
    VolSurface vol = build_vol(config.vol);
    InstrumentSpec spec = build_spec(config.instrument);
    ForwardCurve start = forward_normalize(curve0, spec.nu);
    return Model{std::move(curve0), std::move(vol), std::move(spec), std::move(start)};
}

}  // namespace curvehedge::cli
