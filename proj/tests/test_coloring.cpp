#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "hdrelay/coloring.hpp"

using namespace hdrelay;

namespace {

std::string read_fixture(const std::string& name) {
    std::ifstream in(std::string(FIXTURE_DIR) + "/" + name);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <typename Fn>
std::string render(Fn&& fn) {
    std::ostringstream os;
    fn(os);
    return os.str();
}

Network running_line() { return Network::line({8, 8, 12, 4}); }
Network running_diamond() { return Network::diamond({{3, 3}, {2, 3}, {3, 2}, {2, 2}}); }

ColoringPlan diamond_plan(const Network& net) { return build_plan_diamond(net, capacity_diamond(net)); }

// Packets delivered to the destination per cycle, divided by the cycle length.
Rational schedule_throughput(const ColoringPlan& plan, const ScheduleMatrix& m, std::size_t destination) {
    std::int64_t per_cycle = 0;
    for (const auto& row : m.rows)
        for (std::size_t k = 0; k < row.size(); ++k)
            if (row[k] && plan.links[k].head == destination)
                per_cycle += plan.links[k].capacity;
    return Rational(per_cycle, m.delta());
}

}  // namespace

TEST_CASE("line plan multiplicities") {
    const auto plan = build_plan_line(running_line());
    CHECK(plan.period == 24);
    CHECK(plan.delta == 8);
    std::vector<std::int64_t> n;
    for (const auto& l : plan.links)
        n.push_back(l.multiplicity);
    CHECK(n == std::vector<std::int64_t>{3, 3, 2, 6});
}

TEST_CASE("line HC-EC reproduces the published color sets and schedule") {
    const auto plan = build_plan_line(running_line());
    const auto col = hc_ec_color(plan);
    CHECK(validate_coloring(plan, col));
    CHECK(render([&](std::ostream& os) { write_coloring(os, plan, col); }) == read_fixture("line_hcec_coloring.txt"));
    CHECK(render([&](std::ostream& os) { write_schedule(os, schedule_matrix(plan, col)); }) ==
          read_fixture("line_hcec_schedule.txt"));
}

TEST_CASE("diamond plan multiplicities") {
    const auto plan = diamond_plan(running_diamond());
    CHECK(plan.period == 10);
    CHECK(plan.delta == 10);
    REQUIRE(plan.groups.size() == 3);
    std::vector<std::string> labels;
    std::vector<std::int64_t> n;
    for (const auto& l : plan.links) {
        labels.push_back(l.label);
        n.push_back(l.multiplicity);
    }
    CHECK(labels == std::vector<std::string>{"1,1", "1,2", "2,1", "2,2", "3,1", "3,2"});
    CHECK(n == std::vector<std::int64_t>{5, 5, 3, 2, 2, 3});
    CHECK(remark1_check(plan));
}

TEST_CASE("diamond HC-EC reproduces the published color sets and schedule") {
    const auto plan = diamond_plan(running_diamond());
    const auto col = hc_ec_color(plan);
    CHECK(validate_coloring(plan, col));
    CHECK(render([&](std::ostream& os) { write_coloring(os, plan, col); }) ==
          read_fixture("diamond_hcec_coloring.txt"));
    CHECK(render([&](std::ostream& os) { write_schedule(os, schedule_matrix(plan, col)); }) ==
          read_fixture("diamond_hcec_schedule.txt"));
}

TEST_CASE("EC baseline uses contiguous cyclic runs") {
    const auto plan = build_plan_line(running_line());
    const auto col = ec_baseline_color(plan);
    CHECK(validate_coloring(plan, col));
    CHECK(render([&](std::ostream& os) { write_coloring(os, plan, col); }) == read_fixture("line_ec_coloring.txt"));
    CHECK_THROWS_AS(ec_baseline_color(diamond_plan(running_diamond())), std::invalid_argument);
}

TEST_CASE("schedules deliver the capacity per cycle") {
    const auto line = running_line();
    const auto lp = build_plan_line(line);
    CHECK(schedule_throughput(lp, schedule_matrix(lp, hc_ec_color(lp)), line.destination()) == Rational(3));

    const auto d = running_diamond();
    const auto dp = diamond_plan(d);
    CHECK(schedule_throughput(dp, schedule_matrix(dp, hc_ec_color(dp)), d.destination()) == Rational(27, 10));
}

TEST_CASE("schedule rows are half-duplex feasible") {
    for (const auto& net : {running_line(), running_diamond()}) {
        const auto plan = net.is_line() ? build_plan_line(net) : diamond_plan(net);
        const auto m = schedule_matrix(plan, hc_ec_color(plan));
        CHECK(m.slot_share == Rational(1, plan.delta));
        for (const auto& row : m.rows)
            CHECK(is_feasible_activation(net, to_network_activation(plan, row, net.link_count())));
    }
    const auto d = running_diamond();
    CHECK_FALSE(is_feasible_activation(d, std::vector<std::uint8_t>{1, 0, 1, 0, 0, 0, 0, 0}));
    CHECK_FALSE(is_feasible_activation(d, std::vector<std::uint8_t>{1, 1, 0, 0, 0, 0, 0, 0}));
    CHECK(is_feasible_activation(d, std::vector<std::uint8_t>{1, 0, 0, 1, 0, 0, 0, 0}));
    const auto l = running_line();
    CHECK_FALSE(is_feasible_activation(l, std::vector<std::uint8_t>{0, 1, 1, 0}));
    CHECK(is_feasible_activation(l, std::vector<std::uint8_t>{1, 0, 1, 0}));
}

TEST_CASE("HC-EC is proper on random lines") {
    std::mt19937_64 gen(2024);
    const std::int64_t caps[] = {1, 2, 3, 4, 6, 8, 12, 16, 24};
    std::uniform_int_distribution<std::size_t> pick(0, std::size(caps) - 1);
    std::uniform_int_distribution<std::size_t> len(2, 9);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<std::int64_t> l(len(gen));
        for (auto& c : l)
            c = caps[pick(gen)];
        const auto net = Network::line(l);
        const auto plan = build_plan_line(net);
        const auto col = hc_ec_color(plan);
        CAPTURE(net);
        REQUIRE(validate_coloring(plan, col));
        CHECK(schedule_throughput(plan, schedule_matrix(plan, col), net.destination()) == capacity_line(net).capacity);
    }
}

TEST_CASE("HC-EC is proper on random diamonds") {
    std::mt19937_64 gen(99);
    std::uniform_int_distribution<std::int64_t> cap(1, 6);
    std::uniform_int_distribution<std::size_t> count(1, 5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<PathCaps> paths(count(gen));
        for (auto& p : paths)
            p = {cap(gen), cap(gen)};
        const auto net = Network::diamond(paths);
        const auto plan = diamond_plan(net);
        CAPTURE(net);
        const auto col = hc_ec_color(plan);
        REQUIRE(validate_coloring(plan, col));
        CHECK(schedule_throughput(plan, schedule_matrix(plan, col), net.destination()) ==
              capacity_diamond(net).capacity);
    }
}

TEST_CASE("three-path repair when greedy cannot finish") {
    // Multiplicities violating both greedy sufficiency inequalities.
    const auto net = Network::diamond({{2, 2}, {2, 2}, {2, 2}});
    const std::vector<std::size_t> order{0, 1, 2};
    const std::vector<PathCaps> mult{{2, 2}, {2, 2}, {1, 1}};
    const auto plan = diamond_plan_from_multiplicities(net, order, mult);
    CHECK(plan.delta == 5);
    CHECK_FALSE(remark1_check(plan));

    // First two paths as greedy leaves them; the third is empty.
    Coloring partial;
    partial.color_sets = {{1, 3}, {2, 4}, {2, 4}, {1, 3}, {}, {}};
    const auto repaired = remark1_repair(plan, partial);
    CHECK(validate_coloring(plan, repaired));
    CHECK(validate_coloring(plan, hc_ec_color(plan)));
}

TEST_CASE("remark1_check on two-path and three-path plans") {
    const auto net = Network::diamond({{2, 2}, {2, 2}, {2, 2}});
    const std::vector<std::size_t> two{0, 1};
    const std::vector<PathCaps> m2{{2, 2}, {2, 2}};
    CHECK(remark1_check(diamond_plan_from_multiplicities(net, two, m2)));

    const std::vector<std::size_t> three{0, 1, 2};
    const std::vector<PathCaps> ok{{1, 4}, {1, 1}, {2, 2}};
    CHECK(remark1_check(diamond_plan_from_multiplicities(net, three, ok)));
    CHECK_THROWS_AS(remark1_check(build_plan_line(running_line())), std::invalid_argument);
}

TEST_CASE("coloring is deterministic") {
    const auto plan = diamond_plan(running_diamond());
    CHECK(hc_ec_color(plan) == hc_ec_color(plan));
    const auto lp = build_plan_line(running_line());
    CHECK(hc_ec_color(lp) == hc_ec_color(lp));
}

TEST_CASE("validate_coloring rejects conflicts and wrong counts") {
    const auto plan = build_plan_line(running_line());
    auto col = hc_ec_color(plan);
    auto clash = col;
    clash.color_sets[1] = {1, 3, 5};  // shares colors with link 1 at node 1
    CHECK_FALSE(validate_coloring(plan, clash));
    auto short_by_one = col;
    short_by_one.color_sets[0].erase(short_by_one.color_sets[0].begin());
    CHECK_FALSE(validate_coloring(plan, short_by_one));
    auto out_of_range = col;
    out_of_range.color_sets[2] = {1, 9};
    CHECK_FALSE(validate_coloring(plan, out_of_range));
}
