#pragma once

#include "config.hpp"
#include "output.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace curvehedge::cli {

Table price_table(const ExperimentConfig& config);
Table hedge_table(const ExperimentConfig& config);
Table backtest_table(const ExperimentConfig& config);
/// Rows carry status pass, fail or info; info rows do not affect the outcome.
Table verify_table(const ExperimentConfig& config);

/// Failed verify rows as "check[@maturity]" strings.
std::vector<std::string> failures(const Table& table);

/// Runs price | hedge | backtest | verify, writes <out>/<command>.csv and returns
/// the exit status (verify: 0 iff every check passes).
int run_command(const std::string& command, const ExperimentConfig& config, std::ostream& err);

}  // namespace curvehedge::cli
