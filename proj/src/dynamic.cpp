#include "hdrelay/dynamic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hdrelay {

void PolicyParams::validate(const Network& net) const {
    if (!(rho > 0.0) || !(tau > 0.0))
        throw std::invalid_argument("newBP requires rho > 0 and tau > 0");
    if (beta.size() != net.link_count())
        throw std::invalid_argument("newBP needs one beta per link");
    for (double b : beta)
        if (!(b >= 0.0))
            throw std::invalid_argument("newBP beta values must be nonnegative");
}

PolicyParams default_policy(const Network& net) {
    PolicyParams p;
    if (net.is_line()) {
        const double listed[] = {0.3, 0.2, 0.1, 0.0};
        for (std::size_t i = 0; i < net.link_count(); ++i)
            p.beta.push_back(listed[std::min<std::size_t>(i, 3)]);
    } else {
        const double first_hop[] = {0.0, 1.0, 2.0, 16.0};
        for (std::size_t path = 0; path < net.relay_count(); ++path) {
            p.beta.push_back(first_hop[std::min<std::size_t>(path, 3)]);
            p.beta.push_back(0.0);
        }
    }
    return p;
}

WeightState WeightState::initial(const Network& net) {
    WeightState s;
    s.link_weight.assign(net.link_count(), 0.0);
    s.node_weight.assign(net.node_count(), 0.0);
    s.prev_rates.assign(net.link_count(), 0);
    s.virtual_prev.assign(net.node_count(), 0.0);
    s.virtual_prev2.assign(net.node_count(), 0.0);
    return s;
}

namespace {

std::int64_t backlog(const Network& net, Queues queues, std::size_t node) {
    if (node == net.destination())
        return 0;
    if (node >= queues.size())
        throw std::invalid_argument("queue vector shorter than the relay count");
    return queues[node];
}

}  // namespace

WeightState bp_weights(const Network& net, Queues queues) {
    WeightState s = WeightState::initial(net);
    for (std::size_t k = 0; k < net.link_count(); ++k) {
        const auto diff = backlog(net, queues, net.link_tail(k)) - backlog(net, queues, net.link_head(k));
        s.link_weight[k] = static_cast<double>(std::max<std::int64_t>(diff, 0));
    }
    return s;
}

std::vector<std::int64_t> clipped_rates(const Network& net, Queues queues) {
    std::vector<std::int64_t> r(net.link_count());
    for (std::size_t k = 0; k < r.size(); ++k)
        r[k] = std::min(backlog(net, queues, net.link_tail(k)), net.link_capacity(k));
    return r;
}

double activation_value(std::span<const std::uint8_t> active, std::span<const double> on_value,
                        std::span<const double> off_value) {
    double v = 0.0;
    for (std::size_t k = 0; k < active.size(); ++k)
        v += active[k] ? on_value[k] : off_value[k];
    return v;
}

namespace {

struct Choice {
    double value = 0.0;
    int count = 0;
    std::vector<std::uint8_t> active;
};

// Strict preference: higher value, then fewer links, then lexicographically smaller.
bool preferred(const Choice& a, const Choice& b) {
    if (std::abs(a.value - b.value) > kTieTolerance)
        return a.value > b.value;
    if (a.count != b.count)
        return a.count < b.count;
    return a.active < b.active;
}

std::vector<std::uint8_t> solve_line(std::span<const double> gain) {
    const std::size_t n = gain.size();
    // best[i] is the preferred choice over links i..n-1 (stored as the suffix).
    std::vector<Choice> best(n + 2);
    for (std::size_t i = n; i-- > 0;) {
        Choice skip = best[i + 1];
        skip.active.insert(skip.active.begin(), 0);

        Choice take = best[std::min(i + 2, n + 1)];
        if (i + 1 < n)
            take.active.insert(take.active.begin(), 0);
        take.active.insert(take.active.begin(), 1);
        take.value += gain[i];
        take.count += 1;

        best[i] = preferred(take, skip) ? std::move(take) : std::move(skip);
    }
    return best[0].active;
}

std::vector<std::uint8_t> solve_diamond(std::span<const double> gain) {
    const std::size_t links = gain.size();
    const std::size_t paths = links / 2;
    Choice best;
    best.active.assign(links, 0);
    auto consider = [&](std::initializer_list<std::size_t> on) {
        Choice c;
        c.active.assign(links, 0);
        for (auto k : on) {
            c.active[k] = 1;
            c.value += gain[k];
            ++c.count;
        }
        if (preferred(c, best))
            best = std::move(c);
    };
    for (std::size_t k = 0; k < links; ++k)
        consider({k});
    for (std::size_t p = 0; p < paths; ++p)
        for (std::size_t q = 0; q < paths; ++q)
            if (p != q)
                consider({2 * p, 2 * q + 1});
    return best.active;
}

}  // namespace

std::vector<std::uint8_t> solve_max_weight(const Network& net, std::span<const double> on_value,
                                           std::span<const double> off_value) {
    if (on_value.size() != net.link_count() || off_value.size() != net.link_count())
        throw std::invalid_argument("one on/off value per link is required");
    std::vector<double> gain(net.link_count());
    for (std::size_t k = 0; k < gain.size(); ++k)
        gain[k] = on_value[k] - off_value[k];
    return net.is_line() ? solve_line(gain) : solve_diamond(gain);
}

namespace {

SlotDecision decide(const Network& net, const std::vector<std::int64_t>& capped,
                    std::span<const double> on, std::span<const double> off) {
    SlotDecision d;
    d.active = solve_max_weight(net, on, off);
    d.rates.assign(capped.size(), 0);
    for (std::size_t k = 0; k < capped.size(); ++k)
        if (d.active[k])
            d.rates[k] = capped[k];
    return d;
}

}  // namespace

SlotDecision bp_decide(const Network& net, Queues queues) {
    const auto w = bp_weights(net, queues);
    const auto capped = clipped_rates(net, queues);
    std::vector<double> on(capped.size()), off(capped.size(), 0.0);
    for (std::size_t k = 0; k < on.size(); ++k)
        on[k] = w.link_weight[k] * static_cast<double>(capped[k]);
    return decide(net, capped, on, off);
}

WeightState newbp_weights(const Network& net, WeightState state, const PolicyParams& params) {
    const double inv_tau = 1.0 / params.tau;
    state.node_weight.resize(net.node_count());
    for (std::size_t i = 0; i < net.node_count(); ++i)
        state.node_weight[i] = (1.0 + inv_tau) * state.virtual_prev[i] - inv_tau * state.virtual_prev2[i];
    state.node_weight[net.destination()] = 0.0;
    state.link_weight.resize(net.link_count());
    for (std::size_t k = 0; k < net.link_count(); ++k)
        state.link_weight[k] = state.node_weight[net.link_tail(k)] - state.node_weight[net.link_head(k)];
    return state;
}

SlotDecision newbp_decide(const Network& net, Queues queues, const WeightState& state,
                          const PolicyParams& params) {
    const auto capped = clipped_rates(net, queues);
    std::vector<double> on(capped.size()), off(capped.size());
    for (std::size_t k = 0; k < capped.size(); ++k) {
        const double half_penalty = params.rho * params.beta[k] / 2.0;
        const double r = static_cast<double>(capped[k]);
        const double prev = static_cast<double>(state.prev_rates[k]);
        on[k] = state.link_weight[k] * r - half_penalty * (r - prev) * (r - prev);
        off[k] = -half_penalty * prev * prev;
    }
    return decide(net, capped, on, off);
}

WeightState virtual_update(WeightState state, const PolicyParams& params,
                           std::span<const std::int64_t> departures,
                           std::span<const std::int64_t> arrivals) {
    const double scale = params.rho * params.tau;
    state.virtual_prev2 = state.virtual_prev;
    for (std::size_t i = 0; i < state.virtual_prev.size(); ++i) {
        const double d = i < departures.size() ? static_cast<double>(departures[i]) : 0.0;
        const double a = i < arrivals.size() ? static_cast<double>(arrivals[i]) : 0.0;
        state.virtual_prev[i] += scale * (a - d);
    }
    return state;
}

}  // namespace hdrelay
