#pragma once

// Half-duplex 1-2-1 relay topologies (line and diamond) and their
// approximate capacities, computed with exact rational arithmetic.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

namespace hdrelay {

using Rational = boost::rational<std::int64_t>;

/// "p/q" with q always printed, e.g. "3/1".
std::string to_string(const Rational& r);

enum class NetworkKind { Line, Diamond };

const char* to_string(NetworkKind kind);

/// Two-hop path of a diamond network: source -> relay -> destination.
struct PathCaps {
    std::int64_t first = 0;
    std::int64_t second = 0;

    bool operator==(const PathCaps&) const = default;
};

/// A line or diamond network with integer link capacities in packets/slot.
///
/// Node numbering is shared by both kinds: node 0 is the source, nodes
/// 1..N are relays and node N+1 is the destination. Links are numbered
/// 0-based; for a line, link i joins node i to node i+1; for a diamond,
/// link 2p is the first hop of path p and link 2p+1 its second hop.
class Network {
public:
    /// Throws std::invalid_argument unless there are >= 2 positive capacities.
    static Network line(std::vector<std::int64_t> caps);
    /// Throws std::invalid_argument unless there is >= 1 path of positive capacities.
    static Network diamond(std::vector<PathCaps> paths);

    NetworkKind kind() const { return kind_; }
    bool is_line() const { return kind_ == NetworkKind::Line; }
    bool is_diamond() const { return kind_ == NetworkKind::Diamond; }

    std::size_t relay_count() const;
    std::size_t node_count() const { return relay_count() + 2; }
    std::size_t destination() const { return relay_count() + 1; }
    std::size_t link_count() const;

    std::int64_t link_capacity(std::size_t link) const;
    std::size_t link_tail(std::size_t link) const;
    std::size_t link_head(std::size_t link) const;

    /// Line capacities l_1..l_{N+1}; throws on a diamond.
    const std::vector<std::int64_t>& line_caps() const;
    /// Diamond path capacities; throws on a line.
    const std::vector<PathCaps>& paths() const;

    bool operator==(const Network&) const = default;

private:
    NetworkKind kind_ = NetworkKind::Line;
    std::vector<std::int64_t> line_;
    std::vector<PathCaps> paths_;
};

std::ostream& operator<<(std::ostream& os, const Network& net);

struct CapacityResult {
    Rational capacity;
    /// Per-path time fractions x_p (diamond only).
    std::vector<Rational> path_fractions;
    /// Per-path capacities C_p (diamond only).
    std::vector<Rational> path_capacities;
};

/// log2(1 + |h|^2). Quantizing to packets/slot is left to the caller.
double link_capacity_from_gain(double gain_squared);

Rational path_capacity(std::int64_t first, std::int64_t second);

CapacityResult capacity_line(const Network& net);

/// Exact optimum of the diamond path-fraction LP. Only supports of size <= 3
/// are searched; each restricted LP is solved by exact vertex enumeration.
/// Ties prefer the fewest active paths, then the lexicographically largest x.
CapacityResult capacity_diamond(const Network& net);

/// Dispatches on the network kind.
CapacityResult capacity(const Network& net);

/// "capacity=p/q" plus " x=..." for diamonds.
std::string format_capacity(const CapacityResult& result, NetworkKind kind);

}  // namespace hdrelay
