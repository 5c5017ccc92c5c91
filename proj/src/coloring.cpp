#include "hdrelay/coloring.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>

namespace hdrelay {

namespace {

constexpr int kNoLink = -1;

// Which plan link holds each color at each node.
class Occupancy {
public:
    Occupancy(const ColoringPlan& plan)
        : plan_(&plan), owner_(plan.node_count, std::vector<int>(plan.delta + 1, kNoLink)) {}

    Occupancy(const ColoringPlan& plan, const Coloring& coloring) : Occupancy(plan) {
        for (std::size_t k = 0; k < coloring.color_sets.size(); ++k)
            for (int c : coloring.color_sets[k])
                assign(k, c);
    }

    int owner(std::size_t node, int color) const { return owner_[node][color]; }
    bool free_at(std::size_t node, int color) const { return owner_[node][color] == kNoLink; }

    bool free_for(std::size_t link, int color) const {
        const auto& l = plan_->links[link];
        return free_at(l.tail, color) && free_at(l.head, color);
    }

    void assign(std::size_t link, int color) {
        const auto& l = plan_->links[link];
        owner_[l.tail][color] = static_cast<int>(link);
        owner_[l.head][color] = static_cast<int>(link);
    }

    void release(std::size_t link, int color) {
        const auto& l = plan_->links[link];
        owner_[l.tail][color] = kNoLink;
        owner_[l.head][color] = kNoLink;
    }

    std::optional<int> min_free_for(std::size_t link) const {
        for (int c = 1; c <= plan_->delta; ++c)
            if (free_for(link, c))
                return c;
        return std::nullopt;
    }

    std::optional<int> min_free_at(std::size_t node) const {
        for (int c = 1; c <= plan_->delta; ++c)
            if (free_at(node, c))
                return c;
        return std::nullopt;
    }

private:
    const ColoringPlan* plan_;
    std::vector<std::vector<int>> owner_;
};

void give(Coloring& col, Occupancy& occ, std::size_t link, int color) {
    col.color_sets[link].insert(color);
    occ.assign(link, color);
}

void take(Coloring& col, Occupancy& occ, std::size_t link, int color) {
    col.color_sets[link].erase(color);
    occ.release(link, color);
}

// Classical bipartite repair: with a free at the tail and b free at the
// head, flip the a/b alternating path leaving the head so that a becomes
// free at both ends. The path cannot return to the tail in a bipartite graph.
std::optional<int> alternating_path_color(const ColoringPlan& plan, Coloring& col,
                                          Occupancy& occ, std::size_t link) {
    const auto& l = plan.links[link];
    auto a = occ.min_free_at(l.tail);
    auto b = occ.min_free_at(l.head);
    if (!a || !b)
        return std::nullopt;
    if (occ.free_at(l.head, *a))
        return a;

    std::vector<std::pair<std::size_t, int>> chain;
    std::size_t node = l.head;
    int want = *a;
    while (occ.owner(node, want) != kNoLink) {
        const auto k = static_cast<std::size_t>(occ.owner(node, want));
        chain.emplace_back(k, want);
        node = plan.links[k].tail == node ? plan.links[k].head : plan.links[k].tail;
        want = want == *a ? *b : *a;
        if (node == l.tail)
            return std::nullopt;  // not bipartite; cannot happen for line/diamond
    }
    for (const auto& [k, c] : chain)
        take(col, occ, k, c);
    for (const auto& [k, c] : chain)
        give(col, occ, k, c == *a ? *b : *a);
    return a;
}

using StuckHandler = std::function<std::optional<int>(std::size_t group, std::size_t link)>;

// Runs the horizontal loops over each group. Returns false, leaving the
// partial coloring in place, when the handler gives up on a stuck link.
bool greedy_groups(const ColoringPlan& plan, Coloring& col, Occupancy& occ,
                   std::size_t first_group, const StuckHandler& on_stuck) {
    for (std::size_t g = first_group; g < plan.groups.size(); ++g) {
        const auto& group = plan.groups[g];
        std::int64_t loops = 0;
        for (auto k : group)
            loops = std::max(loops, plan.links[k].multiplicity);
        for (std::int64_t loop = 0; loop < loops; ++loop) {
            for (auto k : group) {
                if (static_cast<std::int64_t>(col.color_sets[k].size()) >= plan.links[k].multiplicity)
                    continue;
                auto c = occ.min_free_for(k);
                if (!c)
                    c = on_stuck(g, k);
                if (!c)
                    return false;
                give(col, occ, k, *c);
            }
        }
    }
    return true;
}

Coloring empty_coloring(const ColoringPlan& plan) {
    Coloring col;
    col.color_sets.resize(plan.links.size());
    return col;
}

Coloring color_with_alternating_paths(const ColoringPlan& plan) {
    Coloring col = empty_coloring(plan);
    Occupancy occ(plan);
    const bool done = greedy_groups(plan, col, occ, 0, [&](std::size_t, std::size_t k) {
        return alternating_path_color(plan, col, occ, k);
    });
    if (!done || !validate_coloring(plan, col))
        throw ColoringError("edge coloring repair failed");
    return col;
}

std::int64_t lcm_all(std::span<const std::int64_t> values) {
    std::int64_t m = 1;
    for (auto v : values)
        m = std::lcm(m, v);
    return m;
}

}  // namespace

ColoringPlan build_plan_line(const Network& net) {
    const auto& caps = net.line_caps();
    ColoringPlan plan;
    plan.kind = NetworkKind::Line;
    plan.node_count = net.node_count();
    plan.period = lcm_all(caps);
    plan.groups.emplace_back();
    for (std::size_t i = 0; i < caps.size(); ++i) {
        PlanLink l;
        l.network_link = i;
        l.label = std::to_string(i + 1);
        l.tail = net.link_tail(i);
        l.head = net.link_head(i);
        l.capacity = caps[i];
        l.multiplicity = plan.period / caps[i];
        plan.links.push_back(l);
        plan.groups.front().push_back(i);
    }
    std::int64_t delta = 0;
    for (std::size_t i = 0; i + 1 < plan.links.size(); ++i)
        delta = std::max(delta, plan.links[i].multiplicity + plan.links[i + 1].multiplicity);
    plan.delta = static_cast<int>(delta);
    return plan;
}

ColoringPlan diamond_plan_from_multiplicities(const Network& net,
                                              std::span<const std::size_t> path_order,
                                              std::span<const PathCaps> multiplicities) {
    if (path_order.size() != multiplicities.size())
        throw std::invalid_argument("path order and multiplicities differ in length");
    const auto& paths = net.paths();
    ColoringPlan plan;
    plan.kind = NetworkKind::Diamond;
    plan.node_count = net.node_count();
    std::int64_t hop1 = 0, hop2 = 0, relay = 0;
    for (std::size_t i = 0; i < path_order.size(); ++i) {
        const std::size_t p = path_order[i];
        if (p >= paths.size())
            throw std::invalid_argument("path index out of range");
        const auto n = multiplicities[i];
        if (n.first <= 0 || n.second <= 0)
            throw std::invalid_argument("active path multiplicities must be positive");
        std::vector<std::size_t> group;
        for (std::size_t j = 0; j < 2; ++j) {
            PlanLink l;
            l.network_link = 2 * p + j;
            l.label = std::to_string(p + 1) + "," + std::to_string(j + 1);
            l.tail = net.link_tail(l.network_link);
            l.head = net.link_head(l.network_link);
            l.capacity = net.link_capacity(l.network_link);
            l.multiplicity = j == 0 ? n.first : n.second;
            group.push_back(plan.links.size());
            plan.links.push_back(l);
        }
        plan.groups.push_back(std::move(group));
        hop1 += n.first;
        hop2 += n.second;
        relay = std::max(relay, n.first + n.second);
    }
    plan.delta = static_cast<int>(std::max({hop1, hop2, relay}));
    return plan;
}

ColoringPlan build_plan_diamond(const Network& net, const CapacityResult& cap) {
    const auto& paths = net.paths();
    if (cap.path_fractions.size() != paths.size())
        throw std::invalid_argument("capacity result does not match the network");

    std::vector<std::size_t> order;
    for (std::size_t p = 0; p < paths.size(); ++p)
        if (cap.path_fractions[p].numerator() > 0)
            order.push_back(p);
    if (order.empty())
        throw std::invalid_argument("no active paths");
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return cap.path_fractions[a] > cap.path_fractions[b];
    });

    // n_{p,j} / M as exact fractions; M clears every denominator.
    std::vector<std::pair<Rational, Rational>> per_period;
    std::int64_t period = 1;
    for (auto p : order) {
        const Rational sum(paths[p].first + paths[p].second);
        const Rational x = cap.path_fractions[p];
        Rational n1 = x * paths[p].second / sum;
        Rational n2 = x * paths[p].first / sum;
        period = std::lcm(period, std::lcm(n1.denominator(), n2.denominator()));
        per_period.emplace_back(n1, n2);
    }
    std::vector<PathCaps> mult;
    for (const auto& [n1, n2] : per_period) {
        const Rational a = n1 * period, b = n2 * period;
        if (a.denominator() != 1 || b.denominator() != 1 || a.numerator() <= 0 || b.numerator() <= 0)
            throw std::logic_error("diamond multiplicities are not positive integers");
        mult.push_back({a.numerator(), b.numerator()});
    }
    ColoringPlan plan = diamond_plan_from_multiplicities(net, order, mult);
    plan.period = period;
    return plan;
}

Coloring hc_ec_color(const ColoringPlan& plan) {
    if (plan.kind == NetworkKind::Line)
        return color_with_alternating_paths(plan);

    // Diamond: the third path gets the dedicated exchange search first.
    struct ThirdPathStuck {};
    Coloring col = empty_coloring(plan);
    Occupancy occ(plan);
    try {
        greedy_groups(plan, col, occ, 0, [&](std::size_t g, std::size_t k) -> std::optional<int> {
            if (g == 2 && plan.groups.size() == 3)
                throw ThirdPathStuck{};
            return alternating_path_color(plan, col, occ, k);
        });
    } catch (const ThirdPathStuck&) {
        try {
            return remark1_repair(plan, col);
        } catch (const ColoringError&) {
            return color_with_alternating_paths(plan);
        }
    }
    if (!validate_coloring(plan, col))
        throw ColoringError("diamond coloring failed validation");
    return col;
}

Coloring ec_baseline_color(const ColoringPlan& plan) {
    if (plan.kind != NetworkKind::Line)
        throw std::invalid_argument("the EC baseline is defined for line networks only");
    Coloring col = empty_coloring(plan);
    std::int64_t next = 0;  // 0-based position in the color cycle
    for (std::size_t k = 0; k < plan.links.size(); ++k) {
        for (std::int64_t e = 0; e < plan.links[k].multiplicity; ++e) {
            col.color_sets[k].insert(static_cast<int>(next % plan.delta) + 1);
            ++next;
        }
    }
    if (!validate_coloring(plan, col))
        throw ColoringError("contiguous-interval coloring is not proper for this network");
    return col;
}

bool remark1_check(const ColoringPlan& plan) {
    if (plan.kind != NetworkKind::Diamond)
        throw std::invalid_argument("remark1_check applies to diamond plans");
    const std::size_t paths = plan.groups.size();
    if (paths <= 2)
        return true;
    if (paths > 3)
        return false;
    auto n = [&](std::size_t p, std::size_t j) { return plan.links[plan.groups[p][j]].multiplicity; };
    auto pos = [](std::int64_t v) { return std::max<std::int64_t>(v, 0); };
    const bool hop1 = n(2, 0) <= pos(n(0, 1) - n(1, 0)) + pos(n(1, 1) - n(0, 0));
    const bool hop2 = n(2, 1) <= pos(n(0, 0) - n(1, 1)) + pos(n(1, 0) - n(0, 1));
    return hop1 || hop2;
}

namespace {

struct Exchange {
    std::size_t link;
    int from;
    int to;
};

// Colors the third path given fixed colors on the first two: horizontal
// greedy first, then an exact split of the hub-free colors.
bool complete_third_path(const ColoringPlan& plan, Coloring& col, Occupancy& occ) {
    const auto& g = plan.groups[2];
    Coloring trial = col;
    Occupancy trial_occ = occ;
    if (greedy_groups(plan, trial, trial_occ, 2, [](std::size_t, std::size_t) { return std::nullopt; })) {
        col = std::move(trial);
        occ = std::move(trial_occ);
        return true;
    }

    const auto& hop1 = plan.links[g[0]];
    const auto& hop2 = plan.links[g[1]];
    std::vector<int> only1, only2, both;
    for (int c = 1; c <= plan.delta; ++c) {
        const bool f1 = occ.free_for(g[0], c);
        const bool f2 = occ.free_for(g[1], c);
        if (f1 && f2)
            both.push_back(c);
        else if (f1)
            only1.push_back(c);
        else if (f2)
            only2.push_back(c);
    }
    std::vector<int> a(only1.begin(), only1.begin() + std::min<std::size_t>(only1.size(), hop1.multiplicity));
    std::vector<int> b(only2.begin(), only2.begin() + std::min<std::size_t>(only2.size(), hop2.multiplicity));
    std::size_t shared = 0;
    while (static_cast<std::int64_t>(a.size()) < hop1.multiplicity && shared < both.size())
        a.push_back(both[shared++]);
    while (static_cast<std::int64_t>(b.size()) < hop2.multiplicity && shared < both.size())
        b.push_back(both[shared++]);
    if (static_cast<std::int64_t>(a.size()) < hop1.multiplicity ||
        static_cast<std::int64_t>(b.size()) < hop2.multiplicity)
        return false;
    for (int c : a)
        give(col, occ, g[0], c);
    for (int c : b)
        give(col, occ, g[1], c);
    return true;
}

}  // namespace

Coloring remark1_repair(const ColoringPlan& plan, const Coloring& partial) {
    if (plan.kind != NetworkKind::Diamond)
        throw std::invalid_argument("remark1_repair applies to diamond plans");
    if (plan.groups.size() < 3)
        return partial;
    if (plan.groups.size() > 3)
        throw ColoringError("more than three active paths");

    Coloring base = partial;
    base.color_sets.resize(plan.links.size());
    for (auto k : plan.groups[2])
        base.color_sets[k].clear();
    Occupancy base_occ(plan, base);

    // Single exchanges: a color held by path 1 or 2 at some hop moves to a
    // color free at that hop's hub (source or destination) and at the relay.
    std::vector<Exchange> moves;
    for (std::size_t p = 0; p < 2; ++p)
        for (auto k : plan.groups[p])
            for (int from : base.color_sets[k])
                for (int to = 1; to <= plan.delta; ++to)
                    if (base_occ.free_for(k, to))
                        moves.push_back({k, from, to});

    const auto n31 = plan.links[plan.groups[2][0]].multiplicity;
    const auto n32 = plan.links[plan.groups[2][1]].multiplicity;
    const std::size_t max_size =
        std::min<std::size_t>(static_cast<std::size_t>(std::min(n31, n32)), moves.size());
    constexpr std::size_t kBudget = 5'000'000;
    std::size_t evaluated = 0;

    auto attempt = [&](std::span<const std::size_t> pick) -> std::optional<Coloring> {
        Coloring col = base;
        Occupancy occ = base_occ;
        for (auto i : pick) {
            const auto& m = moves[i];
            if (!col.color_sets[m.link].count(m.from))
                return std::nullopt;
            take(col, occ, m.link, m.from);
            if (!occ.free_for(m.link, m.to))
                return std::nullopt;
            give(col, occ, m.link, m.to);
        }
        if (!complete_third_path(plan, col, occ) || !validate_coloring(plan, col))
            return std::nullopt;
        return col;
    };

    for (std::size_t size = 0; size <= max_size; ++size) {
        std::vector<std::size_t> pick(size);
        std::iota(pick.begin(), pick.end(), 0);
        while (true) {
            if (++evaluated > kBudget)
                throw ColoringError("three-path exchange search exceeded its budget");
            if (auto col = attempt(pick))
                return *col;
            std::size_t i = size;
            while (i > 0 && pick[i - 1] == moves.size() - size + i - 1)
                --i;
            if (i == 0)
                break;
            ++pick[i - 1];
            for (std::size_t j = i; j < size; ++j)
                pick[j] = pick[j - 1] + 1;
        }
    }
    throw ColoringError("no color exchange completes the third path");
}

bool validate_coloring(const ColoringPlan& plan, const Coloring& coloring) {
    if (coloring.color_sets.size() != plan.links.size())
        return false;
    std::vector<std::vector<bool>> used(plan.node_count, std::vector<bool>(plan.delta + 1, false));
    for (std::size_t k = 0; k < plan.links.size(); ++k) {
        const auto& l = plan.links[k];
        const auto& colors = coloring.color_sets[k];
        if (static_cast<std::int64_t>(colors.size()) != l.multiplicity)
            return false;
        for (int c : colors) {
            if (c < 1 || c > plan.delta)
                return false;
            if (used[l.tail][c] || used[l.head][c])
                return false;
            used[l.tail][c] = used[l.head][c] = true;
        }
    }
    return true;
}

ScheduleMatrix schedule_matrix(const ColoringPlan& plan, const Coloring& coloring) {
    ScheduleMatrix m;
    m.slot_share = Rational(1, plan.delta);
    m.rows.assign(plan.delta, std::vector<std::uint8_t>(plan.links.size(), 0));
    for (std::size_t k = 0; k < plan.links.size(); ++k)
        for (int c : coloring.color_sets.at(k))
            m.rows.at(c - 1)[k] = 1;
    return m;
}

std::vector<std::uint8_t> to_network_activation(const ColoringPlan& plan,
                                                std::span<const std::uint8_t> row,
                                                std::size_t network_links) {
    std::vector<std::uint8_t> active(network_links, 0);
    for (std::size_t k = 0; k < row.size(); ++k)
        if (row[k])
            active.at(plan.links.at(k).network_link) = 1;
    return active;
}

bool is_feasible_activation(const Network& net, std::span<const std::uint8_t> active) {
    if (active.size() != net.link_count())
        return false;
    std::vector<int> degree(net.node_count(), 0);
    for (std::size_t k = 0; k < active.size(); ++k) {
        if (!active[k])
            continue;
        if (++degree[net.link_tail(k)] > 1 || ++degree[net.link_head(k)] > 1)
            return false;
    }
    return true;
}

void write_schedule(std::ostream& os, const ScheduleMatrix& matrix) {
    os << "delta=" << matrix.delta() << " share=" << to_string(matrix.slot_share) << "\n";
    for (const auto& row : matrix.rows) {
        for (std::size_t k = 0; k < row.size(); ++k)
            os << (k ? " " : "") << int(row[k]);
        os << "\n";
    }
}

void write_coloring(std::ostream& os, const ColoringPlan& plan, const Coloring& coloring) {
    for (std::size_t k = 0; k < plan.links.size(); ++k) {
        os << plan.links[k].label << ":";
        bool first = true;
        for (int c : coloring.color_sets.at(k)) {
            os << (first ? " " : ",") << c;
            first = false;
        }
        os << "\n";
    }
}

}  // namespace hdrelay
