#pragma once

// Edge-coloring schedulers over the parallel-edge ("associate") graph of a
// line or diamond network. A color is one network state; cycling through
// the Δ states with equal time share gives a deterministic schedule.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdrelay/topology.hpp"

namespace hdrelay {

/// Raised when no proper coloring could be produced.
class ColoringError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PlanLink {
    std::size_t network_link = 0;  ///< index into Network links
    std::string label;             ///< "i" (line) or "p,j" (diamond), 1-based
    std::size_t tail = 0;
    std::size_t head = 0;
    std::int64_t multiplicity = 0;  ///< number of parallel edges n
    std::int64_t capacity = 0;      ///< underlying link capacity l
};

struct ColoringPlan {
    NetworkKind kind = NetworkKind::Line;
    std::vector<PlanLink> links;
    /// Links colored together in horizontal order: one group for a line,
    /// one two-link group per active path for a diamond.
    std::vector<std::vector<std::size_t>> groups;
    std::int64_t period = 0;  ///< common multiple M
    int delta = 0;            ///< color count, the maximum node degree
    std::size_t node_count = 0;

    std::size_t active_paths() const { return kind == NetworkKind::Diamond ? groups.size() : 0; }
};

/// color_sets[k] are the colors (1..Δ) given to plan link k.
struct Coloring {
    std::vector<std::set<int>> color_sets;

    bool operator==(const Coloring&) const = default;
};

struct ScheduleMatrix {
    std::vector<std::vector<std::uint8_t>> rows;  ///< Δ rows over the plan links
    Rational slot_share;                          ///< 1/Δ per state

    int delta() const { return static_cast<int>(rows.size()); }
};

/// M = lcm(l_i), n_i = M / l_i.
ColoringPlan build_plan_line(const Network& net);

/// Paths are ordered by decreasing x (stable), zero-fraction paths dropped,
/// and M is the smallest value making every n_{p,j} integral.
ColoringPlan build_plan_diamond(const Network& net, const CapacityResult& cap);

/// Diamond plan from explicit per-path multiplicities, already in coloring
/// order. Used to study colorings independently of the capacity LP.
ColoringPlan diamond_plan_from_multiplicities(const Network& net,
                                              std::span<const std::size_t> path_order,
                                              std::span<const PathCaps> multiplicities);

/// Horizontal-continuous edge coloring: max{n} loops per group, each loop
/// hands every unfinished link the smallest color free at both endpoints.
/// Stuck steps are repaired (alternating-path exchange on lines, the
/// three-path exchange search on diamonds).
Coloring hc_ec_color(const ColoringPlan& plan);

/// Baseline: each line link takes a cyclic run of n_i consecutive colors,
/// starting where the previous link's run ended. Throws ColoringError if the
/// result is improper.
Coloring ec_baseline_color(const ColoringPlan& plan);

/// True when greedy coloring of a diamond plan is known to suffice.
bool remark1_check(const ColoringPlan& plan);

/// Completes a diamond coloring whose third path could not be colored
/// greedily, exchanging colors of the first two paths at the same hop.
/// Plans with fewer than three paths are returned unchanged. Throws
/// ColoringError when the bounded search is exhausted.
Coloring remark1_repair(const ColoringPlan& plan, const Coloring& partial);

bool validate_coloring(const ColoringPlan& plan, const Coloring& coloring);

ScheduleMatrix schedule_matrix(const ColoringPlan& plan, const Coloring& coloring);

/// Expands one schedule row (over plan links) into an activation vector
/// over all network links.
std::vector<std::uint8_t> to_network_activation(const ColoringPlan& plan,
                                                std::span<const std::uint8_t> row,
                                                std::size_t network_links);

/// Every node touches at most one active link: no relay transmits and
/// receives at once, and the diamond source and destination each point a
/// single beam.
bool is_feasible_activation(const Network& net, std::span<const std::uint8_t> active);

/// "delta=<Δ> share=1/<Δ>" header followed by one 0/1 row per line.
void write_schedule(std::ostream& os, const ScheduleMatrix& matrix);
/// One "label: c1,c2,..." line per plan link.
void write_coloring(std::ostream& os, const ColoringPlan& plan, const Coloring& coloring);

}  // namespace hdrelay
