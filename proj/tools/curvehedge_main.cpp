#include "cli/commands.hpp"
#include "cli/config.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

std::vector<std::size_t> parse_steps(const std::string& list) {
    std::vector<std::size_t> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        const unsigned long long v = std::stoull(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad step count '" + item + "'");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Curve-hedging experiments: price, hedge, backtest, verify"};
    app.set_version_flag("--version", curvehedge::cli::kVersion);

    std::string command;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths, inner_paths, threads, rebalance;
    std::optional<std::string> steps, out;

    app.add_option("command", command, "price | hedge | backtest | verify")
        ->required()
        ->check(CLI::IsMember({"price", "hedge", "backtest", "verify"}));
    app.add_option("--config", config_path, "JSON experiment config")->required();
    app.add_option("--seed", seed, "Master seed");
    app.add_option("--paths", paths, "Outer Monte Carlo paths");
    app.add_option("--inner-paths", inner_paths, "Inner paths per conditional expectation");
    app.add_option("--steps", steps, "Comma-separated step counts, e.g. 25,50,100,200");
    app.add_option("--threads", threads, "Worker threads (0 = all cores); results do not depend on it");
    app.add_option("--out", out, "Output directory");
    app.add_option("--rebalance-every", rebalance, "Rebalance every k grid steps");
    CLI11_PARSE(app, argc, argv);

    try {
        auto config = curvehedge::cli::load_config(config_path);
        if (seed) config.run.seed = *seed;
        if (paths) config.run.paths = *paths;
        if (inner_paths) config.run.inner_paths = *inner_paths;
        if (steps) config.run.steps = parse_steps(*steps);
        if (threads) config.run.threads = *threads;
        if (out) config.run.out = *out;
        if (rebalance) config.run.rebalance_every = *rebalance;
        const auto violations = curvehedge::cli::validate(config);
        if (!violations.empty()) throw curvehedge::cli::ConfigError(violations);
        return curvehedge::cli::run_command(command, config, std::cerr);
    } catch (const curvehedge::cli::ConfigError& e) {
        for (const auto& v : e.violations()) std::cerr << "config error: " << v << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
