#include "hdrelay/engine.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

namespace hdrelay {

const char* to_string(SchedulerKind kind) {
    switch (kind) {
    case SchedulerKind::HcEc: return "hc-ec";
    case SchedulerKind::Ec: return "ec";
    case SchedulerKind::Bp: return "bp";
    case SchedulerKind::NewBp: return "newbp";
    }
    return "?";
}

std::optional<SchedulerKind> parse_scheduler(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "hc-ec" || lower == "hcec")
        return SchedulerKind::HcEc;
    if (lower == "ec")
        return SchedulerKind::Ec;
    if (lower == "bp")
        return SchedulerKind::Bp;
    if (lower == "newbp" || lower == "new-bp")
        return SchedulerKind::NewBp;
    return std::nullopt;
}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::int64_t Rng::poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean))
        throw std::invalid_argument("Poisson mean must be finite and nonnegative");
    if (mean == 0.0)
        return 0;
    if (mean < 30.0) {
        // Sequential inversion of the CDF.
        const double u = uniform();
        double p = std::exp(-mean);
        double cdf = p;
        std::int64_t k = 0;
        while (u > cdf && k < 1000) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }
    // PTRS transformed rejection (Hörmann 1993).
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    while (true) {
        const double u = uniform() - 0.5;
        const double v = uniform();
        const double us = 0.5 - std::abs(u);
        const auto k = static_cast<std::int64_t>(std::floor((2.0 * a / us + b) * u + mean + 0.43));
        if (us >= 0.07 && v <= vr)
            return k;
        if (k < 0 || (us < 0.013 && v > us))
            continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -mean + static_cast<double>(k) * loglam - std::lgamma(static_cast<double>(k) + 1.0))
            return k;
    }
}

void SimConfig::validate() const {
    if (horizon <= 0)
        throw std::invalid_argument("horizon must be positive");
    if (warmup < 0 || warmup >= horizon)
        throw std::invalid_argument("warmup must satisfy 0 <= warmup < horizon");
    if (!(arrival_rate >= 0.0) || !std::isfinite(arrival_rate))
        throw std::invalid_argument("arrival rate must be finite and nonnegative");
    if (scheduler == SchedulerKind::Ec && !network.is_line())
        throw std::invalid_argument("the EC baseline scheduler supports line networks only");
    if (scheduler == SchedulerKind::NewBp && !policy.beta.empty())
        policy.validate(network);
}

SimState::SimState(Network net) : net_(std::move(net)), queues_(net_.relay_count() + 1) {}

std::vector<std::int64_t> SimState::backlog() const {
    std::vector<std::int64_t> u(queues_.size());
    for (std::size_t i = 0; i < queues_.size(); ++i)
        u[i] = static_cast<std::int64_t>(queues_[i].size());
    return u;
}

std::int64_t SimState::total_backlog() const {
    std::int64_t total = 0;
    for (const auto& q : queues_)
        total += static_cast<std::int64_t>(q.size());
    return total;
}

void SimState::inject(std::int64_t count, std::int64_t created) {
    for (std::int64_t i = 0; i < count; ++i)
        queues_[0].push_back(Packet{next_id_++, created, 0});
}

SlotFlows SimState::step(const SlotDecision& decision, std::int64_t source_arrivals) {
    const std::size_t links = net_.link_count();
    if (decision.active.size() != links || decision.rates.size() != links)
        throw SimulationError("decision does not cover every link");
    if (!is_feasible_activation(net_, decision.active))
        throw SimulationError("infeasible half-duplex activation at slot " + std::to_string(slot_));
    if (source_arrivals < 0)
        throw SimulationError("negative source arrivals");

    SlotFlows flows;
    flows.departures.assign(net_.node_count(), 0);
    flows.arrivals.assign(net_.node_count(), 0);

    // Feasibility means each node is on at most one active link, so the
    // slot-start snapshot equals the live queue for every transmitter.
    const auto start = backlog();
    for (std::size_t k = 0; k < links; ++k) {
        if (!decision.active[k])
            continue;
        if (decision.rates[k] < 0 || decision.rates[k] > net_.link_capacity(k))
            throw SimulationError("transmit rate outside [0, capacity] on link " + std::to_string(k + 1));
        const std::size_t tail = net_.link_tail(k);
        const std::size_t head = net_.link_head(k);
        const std::int64_t moved = std::min(start[tail], decision.rates[k]);
        for (std::int64_t m = 0; m < moved; ++m) {
            Packet p = queues_[tail].front();
            queues_[tail].pop_front();
            if (net_.is_diamond() && tail == 0)
                p.path = head;
            if (head == net_.destination()) {
                delivered_.push_back(DeliveredPacket{p.id, p.created, slot_, p.path});
            } else {
                auto& q = queues_[head];
                if (!q.empty() && q.back().id >= p.id)
                    throw SimulationError("FIFO order violated at node " + std::to_string(head));
                q.push_back(p);
            }
        }
        flows.departures[tail] += moved;
        flows.arrivals[head] += moved;
    }

    inject(source_arrivals, slot_);
    flows.arrivals[0] += source_arrivals;
    ++slot_;
    return flows;
}

void SimState::check_invariants() const {
    const auto in_network = static_cast<std::uint64_t>(total_backlog());
    if (next_id_ != in_network + delivered_.size())
        throw SimulationError("packet conservation violated at slot " + std::to_string(slot_));
}

ScheduleMatrix static_schedule(const Network& net, SchedulerKind kind, ColoringPlan* plan_out) {
    ColoringPlan plan = net.is_line() ? build_plan_line(net) : build_plan_diamond(net, capacity_diamond(net));
    Coloring col;
    if (kind == SchedulerKind::HcEc)
        col = hc_ec_color(plan);
    else if (kind == SchedulerKind::Ec)
        col = ec_baseline_color(plan);
    else
        throw std::invalid_argument("not a static scheduler");
    auto matrix = schedule_matrix(plan, col);
    if (plan_out)
        *plan_out = std::move(plan);
    return matrix;
}

SimTrace run(const SimConfig& config) {
    config.validate();
    const Network& net = config.network;

    SimTrace trace;
    trace.config = config;
    trace.nodes = net.relay_count() + 1;
    trace.backlog.reserve(static_cast<std::size_t>(config.horizon) * trace.nodes);
    trace.arrivals.reserve(static_cast<std::size_t>(config.horizon));

    const bool is_static = config.scheduler == SchedulerKind::HcEc || config.scheduler == SchedulerKind::Ec;
    std::vector<std::vector<std::uint8_t>> cycle;
    if (is_static) {
        ColoringPlan plan;
        const auto matrix = static_schedule(net, config.scheduler, &plan);
        for (const auto& row : matrix.rows)
            cycle.push_back(to_network_activation(plan, row, net.link_count()));
    }

    PolicyParams policy = config.policy;
    if (policy.beta.empty()) {
        const auto defaults = default_policy(net);
        policy.beta = defaults.beta;
    }
    WeightState weights = WeightState::initial(net);

    std::int64_t saturation_level = 0;
    for (std::size_t k = 0; k < net.link_count(); ++k)
        if (net.link_tail(k) == 0)
            saturation_level += net.link_capacity(k);

    Rng rng(config.seed);
    SimState state(net);
    for (std::int64_t t = 0; t < config.horizon; ++t) {
        const auto u = state.backlog();
        trace.backlog.insert(trace.backlog.end(), u.begin(), u.end());

        SlotDecision decision;
        switch (config.scheduler) {
        case SchedulerKind::HcEc:
        case SchedulerKind::Ec: {
            decision.active = cycle[static_cast<std::size_t>(t % static_cast<std::int64_t>(cycle.size()))];
            decision.rates = clipped_rates(net, u);
            for (std::size_t k = 0; k < decision.rates.size(); ++k)
                if (!decision.active[k])
                    decision.rates[k] = 0;
            break;
        }
        case SchedulerKind::Bp:
            decision = bp_decide(net, u);
            break;
        case SchedulerKind::NewBp:
            weights = newbp_weights(net, std::move(weights), policy);
            decision = newbp_decide(net, u, weights, policy);
            break;
        }

        std::int64_t arrivals = 0;
        if (config.saturated) {
            std::int64_t leaving = 0;
            for (std::size_t k = 0; k < net.link_count(); ++k)
                if (net.link_tail(k) == 0)
                    leaving += decision.rates[k];
            arrivals = std::max<std::int64_t>(0, saturation_level - (u[0] - leaving));
        } else {
            arrivals = rng.poisson(config.arrival_rate);
        }

        const auto flows = state.step(decision, arrivals);
        state.check_invariants();
        if (config.scheduler == SchedulerKind::NewBp) {
            weights = virtual_update(std::move(weights), policy, flows.departures, flows.arrivals);
            weights.prev_rates = decision.rates;
        }
        trace.arrivals.push_back(arrivals);
        if (config.record_decisions)
            trace.decisions.push_back(std::move(decision));
    }
    trace.delivered = state.delivered();
    return trace;
}

void write_delivered_csv(std::ostream& os, const SimTrace& trace) {
    os << "packet_id,created_slot,delivered_slot,path_id\n";
    for (const auto& p : trace.delivered)
        os << p.id << "," << p.created << "," << p.delivered << "," << p.path << "\n";
}

void write_backlog_csv(std::ostream& os, const SimTrace& trace) {
    os << "slot";
    for (std::size_t i = 0; i < trace.nodes; ++i)
        os << ",U_" << i;
    os << "\n";
    for (std::int64_t t = 0; t < trace.slots(); ++t) {
        os << t;
        for (std::size_t i = 0; i < trace.nodes; ++i)
            os << "," << trace.backlog_at(t, i);
        os << "\n";
    }
}

void write_decision_log(std::ostream& os, const SimTrace& trace) {
    os << "t, active_links, rates\n";
    for (std::size_t t = 0; t < trace.decisions.size(); ++t) {
        const auto& d = trace.decisions[t];
        std::string active, rates;
        for (std::size_t k = 0; k < d.active.size(); ++k) {
            if (!d.active[k])
                continue;
            active += (active.empty() ? "" : ";") + std::to_string(k + 1);
            rates += (rates.empty() ? "" : ";") + std::to_string(d.rates[k]);
        }
        os << t << ", " << active << ", " << rates << "\n";
    }
}

}  // namespace hdrelay
