#pragma once

// Stability and delay metrics computed from simulation traces.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hdrelay/engine.hpp"

namespace hdrelay {

struct BacklogMetrics {
    double avg_sum = 0.0;           ///< Ū
    std::vector<double> per_node;   ///< Ū_i, nodes 0..N
};

using DelayHistogram = std::map<std::int64_t, std::uint64_t>;

struct DelayStats {
    std::uint64_t count = 0;  ///< zero marks an empty report
    double mean = 0.0;
    std::int64_t p50 = 0;
    std::int64_t p95 = 0;
    std::int64_t p99 = 0;
    DelayHistogram histogram;                         ///< 1-slot bins
    std::map<std::size_t, DelayHistogram> per_path;   ///< diamond relay -> histogram

    bool empty() const { return count == 0; }
};

struct MetricsReport {
    BacklogMetrics backlog;
    double effective_rate = 0.0;  ///< Â over the measured window
    double little_delay = 0.0;    ///< Ū / Â (0 without traffic)
    DelayStats delay;
    std::vector<double> path_pmf;  ///< diamond: P_0 = 1, then P_1..P_N
    double growth_slope = 0.0;     ///< least-squares slope of the sum backlog
    bool stationary = true;        ///< Â below the network capacity
};

/// Time averages of U_i(t) over slots [warmup, T).
BacklogMetrics backlog_metrics(const SimTrace& trace);

/// Delays of delivered packets created at or after the warmup slot.
DelayStats delay_metrics(const SimTrace& trace);

/// Nearest-rank percentile of a histogram (q in (0, 1]).
std::int64_t histogram_percentile(const DelayHistogram& hist, double q);

/// Fraction of delivered packets routed through each relay; P_0 = 1.
/// Lines return {1}. All relay entries are 0 when nothing was delivered.
std::vector<double> path_pmf(const SimTrace& trace);

/// Least-squares slope (packets/slot) of the sum backlog over the window.
double backlog_growth_slope(const SimTrace& trace);

MetricsReport analyze(const SimTrace& trace);

struct LittleCheck {
    bool applicable = false;  ///< false for non-stationary (overloaded) runs
    double discrepancy = 0.0;
};

/// |mean delay - Ū/Â| / (Ū/Â). Throws std::domain_error without traffic.
LittleCheck little_check(const MetricsReport& report);

/// Compact network label without commas, e.g. "line:8/8/12/4" or "diamond:3x3/2x3".
std::string network_label(const Network& net);

/// Report CSV with the fixed column set; `extra_header` is appended verbatim.
void write_report_header(std::ostream& os, const std::string& extra_header = "");
void write_report_row(std::ostream& os, const SimConfig& config, const MetricsReport& report);

/// "delay_slots,count,path_id"; path 0 aggregates all packets.
void write_histogram_csv(std::ostream& os, const DelayStats& stats, bool header = true);

}  // namespace hdrelay
