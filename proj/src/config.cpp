#include "hdrelay/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hdrelay {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object())
        throw ConfigError(where + " must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items())
        if (!ok.count(key))
            throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
T get_as(const json& v, const std::string& what) {
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(what + " has the wrong type");
    }
}

std::int64_t positive_int(const json& v, const std::string& what) {
    if (!v.is_number_integer())
        throw ConfigError(what + " must be an integer");
    return v.get<std::int64_t>();
}

Network parse_network(const json& block) {
    reject_unknown(block, "network", {"kind", "capacities"});
    if (!block.contains("kind") || !block.contains("capacities"))
        throw ConfigError("network needs 'kind' and 'capacities'");
    const auto kind = get_as<std::string>(block["kind"], "network.kind");
    const auto& caps = block["capacities"];
    if (!caps.is_array())
        throw ConfigError("network.capacities must be an array");
    try {
        if (kind == "line") {
            std::vector<std::int64_t> l;
            for (const auto& c : caps)
                l.push_back(positive_int(c, "line capacity"));
            return Network::line(std::move(l));
        }
        if (kind == "diamond") {
            std::vector<PathCaps> paths;
            for (const auto& c : caps) {
                if (!c.is_array() || c.size() != 2)
                    throw ConfigError("diamond capacities must be [first, second] pairs");
                paths.push_back({positive_int(c[0], "diamond capacity"), positive_int(c[1], "diamond capacity")});
            }
            return Network::diamond(std::move(paths));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("network.kind must be 'line' or 'diamond'");
}

std::vector<double> parse_rates(const json& v) {
    std::vector<double> rates;
    if (v.is_array()) {
        for (const auto& r : v)
            rates.push_back(get_as<double>(r, "run.rates entry"));
    } else if (v.is_object()) {
        reject_unknown(v, "run.rates", {"start", "stop", "step"});
        if (!v.contains("start") || !v.contains("stop") || !v.contains("step"))
            throw ConfigError("rate range needs start, stop and step");
        const double start = get_as<double>(v["start"], "run.rates.start");
        const double stop = get_as<double>(v["stop"], "run.rates.stop");
        const double step = get_as<double>(v["step"], "run.rates.step");
        if (!(step > 0.0))
            throw ConfigError("rate range step must be positive");
        for (int i = 0;; ++i) {
            const double r = std::round((start + i * step) * 1e9) / 1e9;
            if (r > stop + 1e-9)
                break;
            rates.push_back(r);
        }
    } else {
        throw ConfigError("run.rates must be a list or a range object");
    }
    return rates;
}

}  // namespace

PolicyParams ExperimentConfig::policy() const {
    PolicyParams p;
    p.rho = rho;
    p.tau = tau;
    p.beta = beta.empty() ? default_policy(network).beta : beta;
    return p;
}

SimConfig ExperimentConfig::sim_config(SchedulerKind scheduler, double rate, std::uint64_t seed) const {
    SimConfig c;
    c.network = network;
    c.scheduler = scheduler;
    c.arrival_rate = rate;
    c.horizon = run.horizon;
    c.warmup = run.warmup;
    c.seed = seed;
    c.policy = policy();
    c.saturated = run.saturated;
    return c;
}

void ExperimentConfig::validate() const {
    if (schedulers.empty())
        throw ConfigError("at least one scheduler is required");
    if (run.rates.empty())
        throw ConfigError("run.rates is empty");
    if (run.seeds.empty())
        throw ConfigError("run.seeds is empty");
    for (double r : run.rates)
        if (!(r >= 0.0) || !std::isfinite(r))
            throw ConfigError("rates must be finite and nonnegative");
    try {
        for (auto s : schedulers)
            sim_config(s, run.rates.front(), run.seeds.front()).validate();
        policy().validate(network);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

ExperimentConfig parse_config(const json& doc) {
    reject_unknown(doc, "config", {"network", "scheduler", "run", "output"});
    ExperimentConfig c;
    if (!doc.contains("network"))
        throw ConfigError("config needs a network block");
    c.network = parse_network(doc["network"]);

    if (doc.contains("scheduler")) {
        const auto& s = doc["scheduler"];
        reject_unknown(s, "scheduler", {"name", "rho", "tau", "beta"});
        if (s.contains("name")) {
            std::vector<std::string> names;
            if (s["name"].is_array())
                names = get_as<std::vector<std::string>>(s["name"], "scheduler.name");
            else
                names.push_back(get_as<std::string>(s["name"], "scheduler.name"));
            c.schedulers.clear();
            for (const auto& n : names) {
                auto kind = parse_scheduler(n);
                if (!kind)
                    throw ConfigError("unknown scheduler '" + n + "'");
                c.schedulers.push_back(*kind);
            }
        }
        if (s.contains("rho"))
            c.rho = get_as<double>(s["rho"], "scheduler.rho");
        if (s.contains("tau"))
            c.tau = get_as<double>(s["tau"], "scheduler.tau");
        if (s.contains("beta"))
            c.beta = get_as<std::vector<double>>(s["beta"], "scheduler.beta");
    }

    if (doc.contains("run")) {
        const auto& r = doc["run"];
        reject_unknown(r, "run", {"rates", "horizon", "warmup", "seeds", "saturated"});
        if (r.contains("rates"))
            c.run.rates = parse_rates(r["rates"]);
        if (r.contains("horizon"))
            c.run.horizon = positive_int(r["horizon"], "run.horizon");
        if (r.contains("warmup"))
            c.run.warmup = positive_int(r["warmup"], "run.warmup");
        if (r.contains("seeds"))
            c.run.seeds = get_as<std::vector<std::uint64_t>>(r["seeds"], "run.seeds");
        if (r.contains("saturated"))
            c.run.saturated = get_as<bool>(r["saturated"], "run.saturated");
    }

    if (doc.contains("output")) {
        const auto& o = doc["output"];
        reject_unknown(o, "output", {"path"});
        if (o.contains("path"))
            c.output_path = get_as<std::string>(o["path"], "output.path");
    }
    c.validate();
    return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return parse_config(doc);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

json to_json(const ExperimentConfig& c) {
    json doc;
    doc["network"]["kind"] = to_string(c.network.kind());
    json caps = json::array();
    if (c.network.is_line()) {
        for (auto l : c.network.line_caps())
            caps.push_back(l);
    } else {
        for (const auto& p : c.network.paths())
            caps.push_back(json::array({p.first, p.second}));
    }
    doc["network"]["capacities"] = caps;

    json names = json::array();
    for (auto s : c.schedulers)
        names.push_back(to_string(s));
    doc["scheduler"]["name"] = names;
    doc["scheduler"]["rho"] = c.rho;
    doc["scheduler"]["tau"] = c.tau;
    if (!c.beta.empty())
        doc["scheduler"]["beta"] = c.beta;

    doc["run"]["rates"] = c.run.rates;
    doc["run"]["horizon"] = c.run.horizon;
    doc["run"]["warmup"] = c.run.warmup;
    doc["run"]["seeds"] = c.run.seeds;
    doc["run"]["saturated"] = c.run.saturated;
    doc["output"]["path"] = c.output_path;
    return doc;
}

}  // namespace hdrelay
