#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hdrelay/cli.hpp"
#include "hdrelay/config.hpp"

using namespace hdrelay;
namespace fs = std::filesystem;

namespace {

const char* kLine = R"({
  "network": {"kind": "line", "capacities": [8, 8, 12, 4]},
  "scheduler": {"name": ["hc-ec", "bp"], "rho": 1, "tau": 1, "beta": [0.3, 0.2, 0.1, 0]},
  "run": {"rates": [1, 2], "horizon": 2000, "warmup": 100, "seeds": [1, 2]},
  "output": {"path": "unused"}
})";

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("hdrelay_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_file(const fs::path& path, const std::string& text) {
    std::ofstream(path) << text;
    return path.string();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Result {
    int code;
    std::string out, err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::main(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("parse a full config") {
    const auto c = parse_config_text(kLine);
    CHECK(c.network == Network::line({8, 8, 12, 4}));
    CHECK(c.schedulers == std::vector<SchedulerKind>{SchedulerKind::HcEc, SchedulerKind::Bp});
    CHECK(c.run.rates == std::vector<double>{1, 2});
    CHECK(c.run.horizon == 2000);
    CHECK(c.run.warmup == 100);
    CHECK(c.run.seeds == std::vector<std::uint64_t>{1, 2});
    CHECK(c.output_path == "unused");
    CHECK(c.policy().beta == std::vector<double>{0.3, 0.2, 0.1, 0});
}

TEST_CASE("config round-trips field for field") {
    for (const char* name : {"line.json", "diamond.json", "line_sweep.json", "diamond_sweep.json"}) {
        CAPTURE(name);
        const auto c = load_config(std::string(CONFIG_DIR) + "/" + name);
        CHECK(parse_config(to_json(c)) == c);
    }
    const auto c = parse_config_text(kLine);
    CHECK(parse_config_text(to_json(c).dump()) == c);
}

TEST_CASE("rate ranges are inclusive") {
    const auto c = parse_config_text(R"({"network": {"kind": "line", "capacities": [1, 1]},
                                         "run": {"rates": {"start": 0.1, "stop": 0.4, "step": 0.1}}})");
    REQUIRE(c.run.rates.size() == 4);
    CHECK(c.run.rates.back() == doctest::Approx(0.4));
}

TEST_CASE("bad configs are rejected") {
    const std::string net = R"("network": {"kind": "line", "capacities": [8, 8]})";
    CHECK_THROWS_AS(parse_config_text("{" + net + R"(, "colour": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{" + net + R"(, "run": {"horizon": 10, "slots": 3}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{" + net + R"(, "run": {"rates": []}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{" + net + R"(, "run": {"rates": [-1]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{" + net + R"(, "run": {"horizon": 10, "warmup": 10}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{" + net + R"(, "scheduler": {"name": "fifo"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{" + net + R"(, "scheduler": {"rho": 0}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{" + net + R"(, "scheduler": {"beta": [1]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"network": {"kind": "ring", "capacities": [1, 1]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"network": {"kind": "line", "capacities": [1, 0]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"network": {"kind": "diamond", "capacities": [[1, 2, 3]]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"network": {"kind": "diamond", "capacities": [[1, 2]]},
                                          "scheduler": {"name": "ec"}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text("{not json"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("overrides") {
    cli::Overrides o;
    o.rate = 2.5;
    o.seed = 9;
    o.scheduler = "newbp";
    o.horizon = 500;
    const auto c = cli::apply(parse_config_text(kLine), o);
    CHECK(c.run.rates == std::vector<double>{2.5});
    CHECK(c.run.seeds == std::vector<std::uint64_t>{9});
    CHECK(c.schedulers == std::vector<SchedulerKind>{SchedulerKind::NewBp});
    CHECK(c.run.horizon == 500);
    o.scheduler = "nope";
    CHECK_THROWS_AS(cli::apply(parse_config_text(kLine), o), ConfigError);
}

TEST_CASE("capacity command") {
    auto r = invoke({"capacity", "--config", std::string(CONFIG_DIR) + "/diamond.json"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out == "capacity=27/10 x=1/1,1/2,1/2,0/1\n");
    r = invoke({"capacity", "--config", std::string(CONFIG_DIR) + "/line.json"});
    CHECK(r.out == "capacity=3/1\n");
}

TEST_CASE("schedule command writes the fixtures") {
    const auto dir = scratch("schedule");
    auto r = invoke({"schedule", "--config", std::string(CONFIG_DIR) + "/line.json", "--out", dir.string()});
    REQUIRE(r.code == cli::kOk);
    CHECK(slurp(dir / "hc-ec_schedule.txt") == slurp(std::string(FIXTURE_DIR) + "/line_hcec_schedule.txt"));
    CHECK(slurp(dir / "hc-ec_coloring.txt") == slurp(std::string(FIXTURE_DIR) + "/line_hcec_coloring.txt"));

    r = invoke({"schedule", "--config", std::string(CONFIG_DIR) + "/diamond.json", "--out", dir.string()});
    REQUIRE(r.code == cli::kOk);
    CHECK(slurp(dir / "hc-ec_schedule.txt") == slurp(std::string(FIXTURE_DIR) + "/diamond_hcec_schedule.txt"));
}

TEST_CASE("simulate command") {
    const auto dir = scratch("simulate");
    const auto cfg = write_file(dir / "c.json", kLine);
    auto r = invoke({"simulate", "--config", cfg, "--out", dir.string(), "--scheduler", "bp", "--rate", "1",
                     "--seed", "3", "--traces"});
    REQUIRE(r.code == cli::kOk);
    const auto report = slurp(dir / "report.csv");
    CHECK(report.rfind("scheduler,network,rate,seed,horizon,warmup,avg_sum_backlog", 0) == 0);
    CHECK(report.find("\nbp,line:8/8/12/4,1,3,2000,100,") != std::string::npos);
    CHECK(fs::exists(dir / "histogram_bp_r1_s3.csv"));
    CHECK(fs::exists(dir / "delivered_bp_r1_s3.csv"));
    CHECK(fs::exists(dir / "backlog_bp_r1_s3.csv"));
    CHECK(fs::exists(dir / "decisions_bp_r1_s3.csv"));
}

TEST_CASE("sweep command") {
    const auto dir = scratch("sweep");
    const auto cfg = write_file(dir / "c.json", kLine);
    auto r = invoke({"sweep", "--config", cfg, "--out", dir.string(), "--jobs", "2"});
    REQUIRE(r.code == cli::kOk);
    std::istringstream rows(slurp(dir / "sweep.csv"));
    std::string line;
    std::getline(rows, line);
    CHECK(line.size() > 0);
    CHECK(line.substr(line.size() - 7) == ",status");
    int count = 0;
    while (std::getline(rows, line)) {
        ++count;
        CHECK(line.substr(line.size() - 3) == ",ok");
    }
    CHECK(count == 8);
}

TEST_CASE("exit codes") {
    CHECK(invoke({"capacity", "--config", "/nonexistent.json"}).code == cli::kConfigError);
    CHECK(invoke({"capacity"}).code == cli::kConfigError);
    CHECK(invoke({"frobnicate"}).code == cli::kConfigError);
    const auto dir = scratch("exit");
    const auto empty = write_file(dir / "e.json", R"({"network": {"kind": "line", "capacities": [1, 1]}, "run": {"rates": []}})");
    auto r = invoke({"simulate", "--config", empty});
    CHECK(r.code == cli::kConfigError);
    CHECK(r.err.find("rates") != std::string::npos);

    // Output path that cannot be created is a runtime failure.
    const auto blocker = write_file(dir / "file", "x");
    const auto cfg = write_file(dir / "c.json", kLine);
    r = invoke({"simulate", "--config", cfg, "--out", (fs::path(blocker) / "sub").string(), "--horizon", "200",
                "--warmup", "0"});
    CHECK(r.code == cli::kRuntimeError);
}
