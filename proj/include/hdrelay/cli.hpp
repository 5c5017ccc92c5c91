#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hdrelay/config.hpp"

namespace hdrelay::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kRuntimeError = 2 };

/// Command-line overrides shared by every subcommand.
struct Overrides {
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<double> rate;
    std::optional<std::int64_t> horizon;
    std::optional<std::int64_t> warmup;
    std::optional<std::string> scheduler;
    unsigned jobs = 0;     ///< sweep workers; 0 = hardware concurrency
    bool traces = false;   ///< simulate: also write per-run trace CSVs
};

/// Applies overrides and revalidates; throws ConfigError.
ExperimentConfig apply(ExperimentConfig config, const Overrides& o);

int cmd_capacity(const ExperimentConfig& config, std::ostream& out);
int cmd_schedule(const ExperimentConfig& config, std::ostream& out);
int cmd_simulate(const ExperimentConfig& config, const Overrides& o, std::ostream& out);
int cmd_sweep(const ExperimentConfig& config, unsigned jobs, std::ostream& out);

/// Full front end: parses argv, dispatches, maps failures to exit codes.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hdrelay::cli
