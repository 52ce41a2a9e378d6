#pragma once

#include "curvehedge/backtest.hpp"
#include "curvehedge/instrument.hpp"
#include "curvehedge/market_model.hpp"
#include "curvehedge/simulation.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace curvehedge::cli {

struct MarketConfig {
    double time = 0.0;
    std::vector<std::pair<double, double>> curve;  // (maturity, bond price)
    double short_rate = 0.0;
};

struct VolConfig {
    VolFamily family = VolFamily::constant;
    std::size_t factors = 1;
    std::vector<double> levels;                        // constant
    std::vector<double> betas;                         // ho-lee
    std::vector<double> sigmas;                        // vasicek
    std::vector<double> speeds;                        // vasicek
    std::vector<double> maturities;                    // piecewise
    std::vector<std::vector<double>> piecewise_levels; // piecewise, one vector per maturity
};

struct PayoffConfig {
    std::string type = "call";  // call | linear | constant
    double strike = 0.0;
    double level = 0.0;
};

struct InstrumentConfig {
    InstrumentKind kind = InstrumentKind::bond_call;
    double exercise = 0.0;
    double settlement = 0.0;        // caplet, generic
    double strike = 0.0;
    double bond_maturity = 0.0;     // bond-call
    std::vector<double> tenor;      // swaption
    std::vector<Atom> mu;           // exchange, generic
    std::vector<Atom> nu;           // exchange, generic
    PayoffConfig payoff;            // generic
};

struct RunConfig {
    std::size_t paths = 10000;
    std::size_t inner_paths = 10000;
    std::vector<std::size_t> steps{25, 50, 100, 200};
    std::uint64_t seed = 1;
    std::string out = "out";
    std::size_t threads = 1;
    StrategyKind strategy = StrategyKind::delta;
    BacktestWorld world = BacktestWorld::curve;
    std::size_t rebalance_every = 1;
    double max_inner_dt = 0.05;
    std::size_t residual_paths = 200;
};

struct ExperimentConfig {
    MarketConfig market;
    VolConfig vol;
    InstrumentConfig instrument;
    RunConfig run;
};

/// Thrown by parse_config; `violations` lists every problem found.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Parses and validates a JSON document. Syntax errors report line and column.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON (sorted keys, two-space indent, trailing newline).
std::string emit_config(const ExperimentConfig& config);

/// Every semantic violation of a config, empty when it is valid.
std::vector<std::string> validate(const ExperimentConfig& config);

/// FNV-1a 64 over the canonical JSON without run.out and run.threads, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Model objects assembled from a validated config.
struct Model {
    BondCurve curve0;
    VolSurface vol;
    InstrumentSpec spec;
    ForwardCurve start;  // curve0 normalized by spec.nu
};

Model build_model(const ExperimentConfig& config);

std::string to_string(BacktestWorld world);

}  // namespace curvehedge::cli
