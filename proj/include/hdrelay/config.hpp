#pragma once

// Experiment configuration files (JSON) with four blocks:
//
//   {
//     "network":   {"kind": "line", "capacities": [8, 8, 12, 4]},
//     "scheduler": {"name": ["hc-ec", "bp", "newbp"], "rho": 1, "tau": 1,
//                   "beta": [0.3, 0.2, 0.1, 0]},
//     "run":       {"rates": [1, 2, 2.5], "horizon": 100000, "warmup": 0,
//                   "seeds": [1, 2], "saturated": false},
//     "output":    {"path": "results"}
//   }
//
// Diamond capacities are pairs: [[3, 3], [2, 3], ...]. "rates" may also be
// a range object {"start": 1, "stop": 3, "step": 0.5} (stop inclusive).
// Unknown keys anywhere are rejected.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hdrelay/dynamic.hpp"
#include "hdrelay/engine.hpp"
#include "hdrelay/topology.hpp"

namespace hdrelay {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunBlock {
    std::vector<double> rates{1.0};
    std::int64_t horizon = 100000;
    std::int64_t warmup = 0;
    std::vector<std::uint64_t> seeds{1};
    bool saturated = false;

    bool operator==(const RunBlock&) const = default;
};

struct ExperimentConfig {
    Network network = Network::line({1, 1});
    std::vector<SchedulerKind> schedulers{SchedulerKind::HcEc};
    double rho = 1.0;
    double tau = 1.0;
    std::vector<double> beta;  ///< empty: per-network defaults
    RunBlock run;
    std::string output_path = ".";

    bool operator==(const ExperimentConfig&) const = default;

    PolicyParams policy() const;
    SimConfig sim_config(SchedulerKind scheduler, double rate, std::uint64_t seed) const;
    /// Throws ConfigError when any invariant fails.
    void validate() const;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace hdrelay
