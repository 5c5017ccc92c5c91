#pragma once

// Per-slot adaptive schedulers: back-pressure (BP) and the virtual-queue
// variant with a quadratic rate-change penalty (newBP).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hdrelay/topology.hpp"

namespace hdrelay {

/// Objective values closer than this are treated as ties.
inline constexpr double kTieTolerance = 1e-9;

struct PolicyParams {
    double rho = 1.0;
    double tau = 1.0;
    /// One entry per network link (line order, or (p,1),(p,2) per path).
    std::vector<double> beta;

    /// Throws std::invalid_argument on rho/tau <= 0, negative beta, or a
    /// beta length different from the link count.
    void validate(const Network& net) const;
};

/// rho = tau = 1 with the per-link penalties used for the running examples
/// (line: 0.3, 0.2, 0.1, 0, ...; diamond first hops 0, 1, 2, 16, ...,
/// second hops 0). Longer networks repeat the last listed value.
PolicyParams default_policy(const Network& net);

struct SlotDecision {
    std::vector<std::uint8_t> active;  ///< Λ(t) over network links
    std::vector<std::int64_t> rates;   ///< packets moved per link
};

/// Per-link weights plus the history newBP carries between slots.
struct WeightState {
    std::vector<double> link_weight;   ///< W (BP) or W̃ (newBP) per link
    std::vector<double> node_weight;   ///< z per node; destination always 0
    std::vector<std::int64_t> prev_rates;
    std::vector<double> virtual_prev;   ///< V(t-1) per node
    std::vector<double> virtual_prev2;  ///< V(t-2) per node

    /// Zeroed state for a network (t <= 0).
    static WeightState initial(const Network& net);
};

using Queues = std::span<const std::int64_t>;

/// Differential backlog weights. `queues` covers nodes 0..N (the
/// destination, if present, is ignored and taken as empty).
WeightState bp_weights(const Network& net, Queues queues);

/// Transmit amounts capped by link capacity and slot-start tail backlog.
std::vector<std::int64_t> clipped_rates(const Network& net, Queues queues);

/// Half-duplex-feasible activation maximizing
/// sum_i on_value[i]*x_i + off_value[i]*(1 - x_i). Ties go to the fewest
/// active links, then to the lexicographically smallest activation.
std::vector<std::uint8_t> solve_max_weight(const Network& net, std::span<const double> on_value,
                                           std::span<const double> off_value);

/// Objective of an activation under the same on/off values.
double activation_value(std::span<const std::uint8_t> active, std::span<const double> on_value,
                        std::span<const double> off_value);

SlotDecision bp_decide(const Network& net, Queues queues);

/// Fills node_weight (z) and link_weight (W̃) from the virtual-queue history.
WeightState newbp_weights(const Network& net, WeightState state, const PolicyParams& params);

/// Uses state.link_weight and state.prev_rates as produced by newbp_weights.
SlotDecision newbp_decide(const Network& net, Queues queues, const WeightState& state,
                          const PolicyParams& params);

/// V(t) = V(t-1) - rho*tau*D(t) + rho*tau*A(t), shifting the history.
/// `departures`/`arrivals` cover nodes 0..N; node 0 arrivals are source input.
WeightState virtual_update(WeightState state, const PolicyParams& params,
                           std::span<const std::int64_t> departures,
                           std::span<const std::int64_t> arrivals);

}  // namespace hdrelay
