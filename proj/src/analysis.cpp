#include "hdrelay/analysis.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hdrelay {

BacklogMetrics backlog_metrics(const SimTrace& trace) {
    const std::int64_t begin = trace.config.warmup;
    const std::int64_t end = trace.slots();
    if (end <= begin)
        throw std::invalid_argument("trace has no measured slots");
    BacklogMetrics m;
    m.per_node.assign(trace.nodes, 0.0);
    std::vector<std::int64_t> sums(trace.nodes, 0);
    for (std::int64_t t = begin; t < end; ++t)
        for (std::size_t i = 0; i < trace.nodes; ++i)
            sums[i] += trace.backlog_at(t, i);
    const double window = static_cast<double>(end - begin);
    std::int64_t total = 0;
    for (std::size_t i = 0; i < trace.nodes; ++i) {
        m.per_node[i] = static_cast<double>(sums[i]) / window;
        total += sums[i];
    }
    m.avg_sum = static_cast<double>(total) / window;
    return m;
}

std::int64_t histogram_percentile(const DelayHistogram& hist, double q) {
    std::uint64_t total = 0;
    for (const auto& [d, c] : hist)
        total += c;
    if (total == 0)
        return 0;
    const auto rank = static_cast<std::uint64_t>(std::ceil(q * static_cast<double>(total)));
    std::uint64_t seen = 0;
    for (const auto& [d, c] : hist) {
        seen += c;
        if (seen >= std::max<std::uint64_t>(rank, 1))
            return d;
    }
    return hist.rbegin()->first;
}

DelayStats delay_metrics(const SimTrace& trace) {
    DelayStats s;
    double sum = 0.0;
    const bool by_path = trace.config.network.is_diamond();
    for (const auto& p : trace.delivered) {
        if (p.created < trace.config.warmup)
            continue;
        const auto d = p.delay();
        ++s.histogram[d];
        if (by_path)
            ++s.per_path[p.path][d];
        sum += static_cast<double>(d);
        ++s.count;
    }
    if (s.count == 0)
        return s;
    s.mean = sum / static_cast<double>(s.count);
    s.p50 = histogram_percentile(s.histogram, 0.50);
    s.p95 = histogram_percentile(s.histogram, 0.95);
    s.p99 = histogram_percentile(s.histogram, 0.99);
    return s;
}

std::vector<double> path_pmf(const SimTrace& trace) {
    const auto& net = trace.config.network;
    if (net.is_line())
        return {1.0};
    std::vector<double> pmf(net.relay_count() + 1, 0.0);
    pmf[0] = 1.0;
    std::uint64_t total = 0;
    std::vector<std::uint64_t> counts(pmf.size(), 0);
    for (const auto& p : trace.delivered) {
        if (p.path == 0 || p.path >= counts.size())
            throw std::logic_error("diamond packet without a relay path");
        ++counts[p.path];
        ++total;
    }
    if (total == 0)
        return pmf;
    for (std::size_t i = 1; i < pmf.size(); ++i)
        pmf[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    return pmf;
}

double backlog_growth_slope(const SimTrace& trace) {
    const std::int64_t begin = trace.config.warmup;
    const std::int64_t end = trace.slots();
    const double n = static_cast<double>(end - begin);
    if (n < 2)
        return 0.0;
    double st = 0, su = 0, stt = 0, stu = 0;
    for (std::int64_t t = begin; t < end; ++t) {
        double u = 0;
        for (std::size_t i = 0; i < trace.nodes; ++i)
            u += static_cast<double>(trace.backlog_at(t, i));
        const double x = static_cast<double>(t);
        st += x;
        su += u;
        stt += x * x;
        stu += x * u;
    }
    return (n * stu - st * su) / (n * stt - st * st);
}

MetricsReport analyze(const SimTrace& trace) {
    MetricsReport r;
    r.backlog = backlog_metrics(trace);
    std::int64_t arrived = 0;
    for (std::int64_t t = trace.config.warmup; t < trace.slots(); ++t)
        arrived += trace.arrivals[static_cast<std::size_t>(t)];
    r.effective_rate = static_cast<double>(arrived) / static_cast<double>(trace.slots() - trace.config.warmup);
    r.little_delay = r.effective_rate > 0 ? r.backlog.avg_sum / r.effective_rate : 0.0;
    r.delay = delay_metrics(trace);
    r.path_pmf = path_pmf(trace);
    r.growth_slope = backlog_growth_slope(trace);
    const double cap = boost::rational_cast<double>(capacity(trace.config.network).capacity);
    r.stationary = r.effective_rate < cap;
    return r;
}

LittleCheck little_check(const MetricsReport& report) {
    if (!(report.effective_rate > 0.0))
        throw std::domain_error("Little's law check needs a positive arrival rate");
    LittleCheck c;
    c.applicable = report.stationary && !report.delay.empty();
    if (!c.applicable)
        return c;
    const double predicted = report.backlog.avg_sum / report.effective_rate;
    c.discrepancy = std::abs(report.delay.mean - predicted) / predicted;
    return c;
}

std::string network_label(const Network& net) {
    std::ostringstream os;
    os << to_string(net.kind()) << ":";
    if (net.is_line()) {
        for (std::size_t i = 0; i < net.line_caps().size(); ++i)
            os << (i ? "/" : "") << net.line_caps()[i];
    } else {
        for (std::size_t i = 0; i < net.paths().size(); ++i)
            os << (i ? "/" : "") << net.paths()[i].first << "x" << net.paths()[i].second;
    }
    return os.str();
}

void write_report_header(std::ostream& os, const std::string& extra_header) {
    os << "scheduler,network,rate,seed,horizon,warmup,avg_sum_backlog,effective_rate,"
          "little_delay,mean_delay,p50,p95,p99"
       << extra_header << "\n";
}

void write_report_row(std::ostream& os, const SimConfig& config, const MetricsReport& report) {
    std::ostringstream row;
    row << std::setprecision(10);
    row << to_string(config.scheduler) << "," << network_label(config.network) << ","
        << (config.saturated ? std::string("saturated") : [&] {
               std::ostringstream r;
               r << config.arrival_rate;
               return r.str();
           }())
        << "," << config.seed << "," << config.horizon << "," << config.warmup << ","
        << report.backlog.avg_sum << "," << report.effective_rate << "," << report.little_delay << ","
        << report.delay.mean << "," << report.delay.p50 << "," << report.delay.p95 << ","
        << report.delay.p99;
    os << row.str();
}

void write_histogram_csv(std::ostream& os, const DelayStats& stats, bool header) {
    if (header)
        os << "delay_slots,count,path_id\n";
    for (const auto& [d, c] : stats.histogram)
        os << d << "," << c << ",0\n";
    for (const auto& [path, hist] : stats.per_path)
        for (const auto& [d, c] : hist)
            os << d << "," << c << "," << path << "\n";
}

}  // namespace hdrelay
