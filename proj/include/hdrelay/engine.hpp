#pragma once

// Slotted-time FIFO packet simulation of a relay network under a static
// (edge-coloring) or dynamic (back-pressure) scheduler.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hdrelay/coloring.hpp"
#include "hdrelay/dynamic.hpp"
#include "hdrelay/topology.hpp"

namespace hdrelay {

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SchedulerKind { HcEc, Ec, Bp, NewBp };

const char* to_string(SchedulerKind kind);
/// Accepts "hc-ec", "ec", "bp", "newbp" (case-insensitive).
std::optional<SchedulerKind> parse_scheduler(std::string_view name);

/// Portable generator: std::mt19937_64 (fully specified by the standard),
/// uniform doubles from the top 53 bits, and our own Poisson sampler
/// (sequential inversion below mean 30, Hörmann's PTRS above), so traces
/// reproduce bit-for-bit on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform();
    std::int64_t poisson(double mean);

private:
    std::mt19937_64 engine_;
};

inline std::int64_t poisson_sample(Rng& rng, double mean) { return rng.poisson(mean); }

struct SimConfig {
    Network network = Network::line({1, 1});
    SchedulerKind scheduler = SchedulerKind::HcEc;
    double arrival_rate = 0.0;  ///< Poisson mean per slot at the source
    std::int64_t horizon = 1;   ///< slots simulated
    std::int64_t warmup = 0;    ///< leading slots excluded from metrics
    std::uint64_t seed = 1;
    PolicyParams policy;        ///< newBP only; empty beta means defaults
    /// Keep the source backlogged instead of drawing Poisson arrivals.
    bool saturated = false;
    bool record_decisions = false;

    /// Throws std::invalid_argument on an inconsistent configuration.
    void validate() const;
};

struct Packet {
    std::uint64_t id = 0;
    std::int64_t created = 0;
    std::size_t path = 0;  ///< diamond relay (1-based) once it leaves the source; 0 on lines
};

struct DeliveredPacket {
    std::uint64_t id = 0;
    std::int64_t created = 0;
    std::int64_t delivered = 0;
    std::size_t path = 0;

    std::int64_t delay() const { return delivered - created; }
};

/// Per-node movement during one slot (nodes 0..N+1).
struct SlotFlows {
    std::vector<std::int64_t> departures;
    std::vector<std::int64_t> arrivals;  ///< node 0 includes the source input
};

/// Queues and bookkeeping of one simulation.
class SimState {
public:
    explicit SimState(Network net);

    const Network& network() const { return net_; }
    std::int64_t slot() const { return slot_; }

    /// U_i for nodes 0..N.
    std::vector<std::int64_t> backlog() const;
    std::int64_t total_backlog() const;
    const std::deque<Packet>& queue(std::size_t node) const { return queues_.at(node); }

    /// Appends `count` new packets stamped with `created` to the source queue.
    void inject(std::int64_t count, std::int64_t created);

    /// One slot: transmissions from slot-start queues, then `source_arrivals`
    /// packets (stamped with the current slot) join the source, then the
    /// slot counter advances. Throws SimulationError on an infeasible decision.
    SlotFlows step(const SlotDecision& decision, std::int64_t source_arrivals);

    std::uint64_t injected() const { return next_id_; }
    const std::vector<DeliveredPacket>& delivered() const { return delivered_; }

    /// Packet conservation and queue-length consistency.
    void check_invariants() const;

private:
    Network net_;
    std::int64_t slot_ = 0;
    std::vector<std::deque<Packet>> queues_;  // nodes 0..N
    std::uint64_t next_id_ = 0;
    std::vector<DeliveredPacket> delivered_;
};

struct SimTrace {
    SimConfig config;
    std::size_t nodes = 0;                   ///< N+1 tracked queues (0..N)
    std::vector<std::int64_t> backlog;       ///< slot-major, U_i(t) at slot start
    std::vector<std::int64_t> arrivals;      ///< A_0(t) per slot
    std::vector<DeliveredPacket> delivered;
    std::vector<SlotDecision> decisions;     ///< when record_decisions is set

    std::int64_t slots() const { return static_cast<std::int64_t>(arrivals.size()); }
    std::int64_t backlog_at(std::int64_t t, std::size_t node) const {
        return backlog[static_cast<std::size_t>(t) * nodes + node];
    }
};

/// Builds the static schedule used by HC-EC/EC runs.
ScheduleMatrix static_schedule(const Network& net, SchedulerKind kind, ColoringPlan* plan_out = nullptr);

SimTrace run(const SimConfig& config);

/// "packet_id,created_slot,delivered_slot,path_id"
void write_delivered_csv(std::ostream& os, const SimTrace& trace);
/// "slot,U_0,...,U_N"
void write_backlog_csv(std::ostream& os, const SimTrace& trace);
/// "t, active_links, rates" with 1-based link numbers separated by ';'.
void write_decision_log(std::ostream& os, const SimTrace& trace);

}  // namespace hdrelay
