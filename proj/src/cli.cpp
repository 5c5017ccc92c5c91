#include "hdrelay/cli.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "hdrelay/analysis.hpp"
#include "hdrelay/coloring.hpp"

namespace hdrelay::cli {

namespace fs = std::filesystem;

ExperimentConfig apply(ExperimentConfig config, const Overrides& o) {
    if (o.out)
        config.output_path = *o.out;
    if (o.seed)
        config.run.seeds = {*o.seed};
    if (o.rate)
        config.run.rates = {*o.rate};
    if (o.horizon)
        config.run.horizon = *o.horizon;
    if (o.warmup)
        config.run.warmup = *o.warmup;
    if (o.scheduler) {
        auto kind = parse_scheduler(*o.scheduler);
        if (!kind)
            throw ConfigError("unknown scheduler '" + *o.scheduler + "'");
        config.schedulers = {*kind};
    }
    config.validate();
    return config;
}

namespace {

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("cannot write " + path.string());
    return f;
}

std::string rate_tag(double rate) {
    std::ostringstream os;
    os << rate;
    return os.str();
}

std::string run_tag(const SimConfig& c) {
    return std::string(to_string(c.scheduler)) + "_r" + (c.saturated ? "sat" : rate_tag(c.arrival_rate)) +
           "_s" + std::to_string(c.seed);
}

}  // namespace

int cmd_capacity(const ExperimentConfig& config, std::ostream& out) {
    out << format_capacity(capacity(config.network), config.network.kind()) << "\n";
    return kOk;
}

int cmd_schedule(const ExperimentConfig& config, std::ostream& out) {
    std::vector<SchedulerKind> kinds;
    for (auto s : config.schedulers)
        if (s == SchedulerKind::HcEc || s == SchedulerKind::Ec)
            kinds.push_back(s);
    if (kinds.empty())
        kinds.push_back(SchedulerKind::HcEc);

    const fs::path dir(config.output_path);
    for (auto kind : kinds) {
        ColoringPlan plan = config.network.is_line()
                                ? build_plan_line(config.network)
                                : build_plan_diamond(config.network, capacity_diamond(config.network));
        const Coloring col = kind == SchedulerKind::HcEc ? hc_ec_color(plan) : ec_baseline_color(plan);
        const ScheduleMatrix matrix = schedule_matrix(plan, col);

        const std::string name = to_string(kind);
        auto cf = open_output(dir / (name + "_coloring.txt"));
        write_coloring(cf, plan, col);
        auto sf = open_output(dir / (name + "_schedule.txt"));
        write_schedule(sf, matrix);

        out << "# " << name << " M=" << plan.period << " delta=" << plan.delta;
        if (plan.kind == NetworkKind::Diamond)
            out << " paths=" << plan.groups.size() << " greedy_ok=" << (remark1_check(plan) ? "yes" : "no");
        out << "\n";
        write_coloring(out, plan, col);
        write_schedule(out, matrix);
    }
    return kOk;
}

int cmd_simulate(const ExperimentConfig& config, const Overrides& o, std::ostream& out) {
    const fs::path dir(config.output_path);
    auto report = open_output(dir / "report.csv");
    write_report_header(report);
    write_report_header(out);
    const SchedulerKind scheduler = config.schedulers.front();
    for (double rate : config.run.rates) {
        for (auto seed : config.run.seeds) {
            SimConfig sc = config.sim_config(scheduler, rate, seed);
            sc.record_decisions = o.traces;
            const SimTrace trace = run(sc);
            const MetricsReport m = analyze(trace);
            write_report_row(report, sc, m);
            report << "\n";
            write_report_row(out, sc, m);
            out << "\n";

            const std::string tag = run_tag(sc);
            auto hist = open_output(dir / ("histogram_" + tag + ".csv"));
            write_histogram_csv(hist, m.delay);
            if (o.traces) {
                auto d = open_output(dir / ("delivered_" + tag + ".csv"));
                write_delivered_csv(d, trace);
                auto b = open_output(dir / ("backlog_" + tag + ".csv"));
                write_backlog_csv(b, trace);
                auto l = open_output(dir / ("decisions_" + tag + ".csv"));
                write_decision_log(l, trace);
            }
        }
    }
    return kOk;
}

int cmd_sweep(const ExperimentConfig& config, unsigned jobs, std::ostream& out) {
    struct Job {
        SimConfig sim;
        std::string row;
    };
    std::vector<Job> work;
    for (auto s : config.schedulers)
        for (double rate : config.run.rates)
            for (auto seed : config.run.seeds)
                work.push_back({config.sim_config(s, rate, seed), {}});

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < work.size(); i = next++) {
            std::ostringstream row;
            try {
                const MetricsReport m = analyze(run(work[i].sim));
                write_report_row(row, work[i].sim, m);
                row << ",ok";
            } catch (const std::exception& e) {
                std::string msg = e.what();
                std::replace(msg.begin(), msg.end(), ',', ';');
                row.str("");
                row << to_string(work[i].sim.scheduler) << "," << network_label(work[i].sim.network) << ","
                    << work[i].sim.arrival_rate << "," << work[i].sim.seed << "," << work[i].sim.horizon << ","
                    << work[i].sim.warmup << ",nan,nan,nan,nan,nan,nan,nan,error: " << msg;
            }
            work[i].row = row.str();
        }
    };
    if (jobs == 0)
        jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, work.size()));
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();

    const fs::path path = fs::path(config.output_path) / "sweep.csv";
    auto csv = open_output(path);
    write_report_header(csv, ",status");
    for (const auto& j : work)
        csv << j.row << "\n";
    out << "wrote " << work.size() << " rows to " << path.string() << "\n";
    return kOk;
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Half-duplex relay network scheduling: capacities, schedules and simulation"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Experiment config (JSON)")->required();
        sub->add_option("--out", o.out, "Output directory");
        sub->add_option("--seed", o.seed, "Single RNG seed");
        sub->add_option("--rate", o.rate, "Single source arrival rate (packets/slot)");
        sub->add_option("--horizon", o.horizon, "Simulated slots");
        sub->add_option("--warmup", o.warmup, "Slots excluded from metrics");
        sub->add_option("--scheduler", o.scheduler, "hc-ec, ec, bp or newbp");
    };
    auto* capacity_cmd = app.add_subcommand("capacity", "Print the approximate network capacity");
    auto* schedule_cmd = app.add_subcommand("schedule", "Write edge-coloring schedules");
    auto* simulate_cmd = app.add_subcommand("simulate", "Run simulations and write metrics");
    auto* sweep_cmd = app.add_subcommand("sweep", "Run schedulers x rates x seeds into one CSV");
    for (auto* sub : {capacity_cmd, schedule_cmd, simulate_cmd, sweep_cmd})
        add_common(sub);
    simulate_cmd->add_flag("--traces", o.traces, "Also write delivered/backlog/decision traces");
    sweep_cmd->add_option("--jobs", o.jobs, "Worker threads (0 = all cores)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }

    ExperimentConfig config;
    try {
        config = apply(load_config(config_path), o);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        if (capacity_cmd->parsed())
            return cmd_capacity(config, out);
        if (schedule_cmd->parsed())
            return cmd_schedule(config, out);
        if (simulate_cmd->parsed())
            return cmd_simulate(config, o, out);
        return cmd_sweep(config, o.jobs, out);
    } catch (const ColoringError& e) {
        err << "coloring failed: " << e.what() << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
    }
    return kRuntimeError;
}

}  // namespace hdrelay::cli
