#include "orgsim/cli.hpp"
#include "orgsim/config.hpp"
#include "orgsim/errors.hpp"
#include "orgsim/outputs.hpp"

#include "support/generators.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace orgsim;
namespace fs = std::filesystem;

namespace {

const fs::path kData = ORGSIM_TEST_DATA;

std::string data(const char* name) { return (kData / name).string(); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("orgsim_test_" + name);
    fs::remove_all(dir);
    return dir;
}

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = execute_command(args, out, err);
    return {code, out.str(), err.str()};
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

ConfigError config_error(const std::string& path) {
    try {
        parse_scenario_config(path);
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected ConfigError");
    throw std::logic_error("unreachable");
}

bool has_issue(const ConfigError& e, std::string_view path, std::string_view reason) {
    for (const auto& i : e.issues()) {
        if (i.path.find(path) != std::string::npos && i.reason.find(reason) != std::string::npos) {
            return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("minimal config gets every default") {
    const ScenarioConfig cfg = parse_scenario_config(data("minimal.json"));
    const ScenarioConstants defaults;
    CHECK(cfg.horizon == 1000.0);
    CHECK(cfg.constants.eta_m == defaults.eta_m);
    CHECK(cfg.constants.eta_p == 0.05);
    CHECK(cfg.constants.eta_k == 0.3);
    CHECK(cfg.constants.kappa_meet == 4.0);
    CHECK(distribution_mean(cfg.constants.support_duration) == 2.0);
    CHECK(distribution_mean(cfg.constants.support_timeout) == 1.0);
    CHECK(cfg.constants.meeting_interval == 40.0);
    CHECK(distribution_mean(cfg.constants.meeting_duration) == 1.0);
    CHECK(cfg.constants.g_supported == 0.9);
    CHECK(cfg.constants.g_unsupported == 0.5);
    CHECK(cfg.constants.cost_base == 10.0);
    CHECK(cfg.constants.cost_skill == 20.0);
    CHECK(cfg.constants.trace_interval == 10.0);
    REQUIRE(cfg.department.teams.size() == 1);
    CHECK(cfg.department.teams[0].designers.size() == 1);
    REQUIRE(cfg.contracts.explicit_contracts.size() == 1);
    CHECK_FALSE(cfg.contracts.explicit_contracts[0].teamwork);
}

TEST_CASE("schema errors cite the field") {
    SUBCASE("level out of range") {
        const auto e = config_error(data("bad_communication.json"));
        CHECK(e.kind() == ConfigError::Kind::Schema);
        CHECK(has_issue(e, "department.stereotypes.designer.communication", "outside [0,1]"));
    }
    SUBCASE("deadline before arrival") {
        const auto e = config_error(data("bad_deadline.json"));
        CHECK(has_issue(e, "contracts.explicit.0.deadline", "after arrival_time"));
    }
    SUBCASE("every defect is listed") {
        const auto e = config_error(data("many_defects.json"));
        CHECK(e.issues().size() >= 3);
        CHECK(has_issue(e, "constants.eta_mm", "unknown field"));
    }
    SUBCASE("syntax error names the line") {
        const auto e = config_error(data("syntax_error.json"));
        CHECK(e.kind() == ConfigError::Kind::Syntax);
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
    SUBCASE("missing file") { CHECK(config_error(data("nope.json")).kind() == ConfigError::Kind::FileNotFound); }
}

TEST_CASE("parse, write back, parse is idempotent") {
    const auto first = to_json(parse_scenario_config(data("minimal.json")));
    CHECK(to_json(parse_scenario_json(first)) == first);

    std::mt19937_64 gen(55);
    for (int i = 0; i < 100; ++i) {
        const auto normal = to_json(orgsim::testing::random_config(gen));
        const auto again = to_json(parse_scenario_json(normal));
        REQUIRE(again == normal);
        CHECK(to_json(parse_scenario_text(again.dump(2))) == again);
    }
}

TEST_CASE("numeric config paths") {
    auto doc = to_json(parse_scenario_config(data("minimal.json")));
    set_config_value(doc, "constants.eta_m", 0.25);
    CHECK(get_config_value(doc, "constants.eta_m") == 0.25);
    CHECK(parse_scenario_json(doc).constants.eta_m == 0.25);
    CHECK_THROWS_AS(set_config_value(doc, "constants.nothing", 1.0), ConfigError);
    CHECK_THROWS_AS(get_config_value(doc, "department.manager"), ConfigError);
    const auto cfg = with_overrides(parse_scenario_config(data("minimal.json")), {{"horizon", 12.0}});
    CHECK(cfg.horizon == 12.0);
    CHECK_THROWS_AS(with_overrides(cfg, {{"constants.eta_m", -1.0}}), ConfigError);
}

TEST_CASE("request files") {
    const auto sweep = parse_sweep_spec(read_json_file(data("sweep.json")));
    CHECK(sweep.parameters == std::vector<std::string>{"constants.eta_m", "horizon"});
    const auto grid = sweep_grid(sweep);
    REQUIRE(grid.size() == 4);
    CHECK(grid[0] == std::vector<double>{0.0, 50.0});
    CHECK(grid[1] == std::vector<double>{0.0, 100.0});
    CHECK(grid[3] == std::vector<double>{0.1, 100.0});

    const auto cal = parse_calibration_spec(read_json_file(data("calibration.json")));
    REQUIRE(cal.space.size() == 1);
    CHECK(cal.space[0].hi == 0.5);
    CHECK(cal.targets.size() == 2);
    CHECK(cal.budget == 12u);
    CHECK(cal.top_k == 3);
    CHECK(cal.replications_per_eval == 2);
    CHECK_THROWS_AS(parse_calibration_spec(nlohmann::json::parse(R"({"parameters": {"a": [1, 0]}})")), ConfigError);
}

TEST_CASE("csv formatting") {
    CHECK(format_real(0.1) == "0.100000");
    CHECK(format_real(-0.0) == "0.000000");
    CHECK(format_real(-1e-9) == "0.000000");
    CHECK(format_real(12345.6789) == "12345.678900");
}

TEST_CASE("run writes summaries, byte-stable, trace only on request") {
    const auto dir = fresh_dir("run");
    auto args = [&](const fs::path& out) {
        return std::vector<std::string>{"run", "--config", data("minimal.json"), "--seed", "42",
                                        "--horizon", "100", "--replications", "3", "--out", out.string()};
    };
    auto r = run(args(dir / "a"));
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    const std::string summary = slurp(dir / "a" / "run_summary.csv");
    CHECK(summary.rfind("replication,seed,contracts_arrived,contracts_completed,on_time_fraction,mean_tardiness_h,"
                        "mean_team_productivity,total_cost,productivity_per_cost\n",
                        0) == 0);
    CHECK(lines(summary) == 4);
    CHECK(fs::exists(dir / "a" / "run_stats.csv"));
    CHECK_FALSE(fs::exists(dir / "a" / "agent_trace.csv"));
    CHECK_FALSE(fs::exists(dir / "a" / "events.log"));

    REQUIRE(run(args(dir / "b")).code == 0);
    CHECK(slurp(dir / "b" / "run_summary.csv") == summary);

    auto traced = args(dir / "c");
    traced.push_back("--trace");
    traced.push_back("--events-log");
    REQUIRE(run(traced).code == 0);
    CHECK(slurp(dir / "c" / "run_summary.csv") == summary);
    CHECK(slurp(dir / "c" / "agent_trace.csv").rfind("time,agent_id,attribute,value\n", 0) == 0);
    CHECK(lines(slurp(dir / "c" / "events.log")) > 0);
    for (const auto& entry : fs::directory_iterator(dir / "c")) {
        CHECK(entry.path().filename().string().find(".tmp") == std::string::npos);
    }
}

TEST_CASE("ORGSIM_OUT sets the default output directory") {
    const auto dir = fresh_dir("env");
    ::setenv("ORGSIM_OUT", dir.string().c_str(), 1);
    const auto r = run({"run", "--config", data("minimal.json"), "--horizon", "10"});
    ::unsetenv("ORGSIM_OUT");
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "run_summary.csv"));
}

TEST_CASE("validate") {
    const auto ok = run({"validate", "--config", data("minimal.json")});
    CHECK(ok.code == 0);
    const auto bad = run({"validate", "--config", data("many_defects.json")});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("communication") != std::string::npos);
    CHECK(bad.err.find("eta_mm") != std::string::npos);
    CHECK(bad.out.empty());
}

TEST_CASE("usage errors and help") {
    CHECK(run({"run", "--config", data("minimal.json"), "--bogus"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"dance"}).code == 2);
    CHECK(run({"run"}).code == 2);
    CHECK(run({"compare", "--config", data("minimal.json")}).code == 2);
    CHECK(run({"run", "--config", data("minimal.json"), "--alpha", "1.5"}).code == 2);
    const auto help = run({"--help"});
    CHECK(help.code == 0);
    for (const char* flag : {"--config", "--config-b", "--seed", "--replications", "--horizon", "--out", "--trace",
                             "--events-log", "--sweep", "--targets", "--budget", "--alpha"}) {
        CHECK_MESSAGE(help.out.find(flag) != std::string::npos, flag);
    }
    for (const char* cmd : {"run", "sweep", "compare", "calibrate", "validate"}) {
        CHECK(help.out.find(cmd) != std::string::npos);
    }
}

TEST_CASE("compare, sweep and calibrate write their reports") {
    const auto dir = fresh_dir("batch");
    const std::string out = dir.string();
    REQUIRE(run({"compare", "--config", data("minimal.json"), "--config-b", data("minimal.json"), "--replications",
                 "4", "--seed", "7", "--horizon", "60", "--out", out})
                .code == 0);
    const std::string cmp = slurp(dir / "compare_summary.csv");
    CHECK(cmp.rfind("metric,n,mean_a,mean_b,mean_diff,sd_diff,ci_low,ci_high,alpha\n", 0) == 0);
    CHECK(cmp.find("total_cost,4,") != std::string::npos);

    REQUIRE(run({"sweep", "--config", data("minimal.json"), "--sweep", data("sweep.json"), "--replications", "2",
                 "--out", out})
                .code == 0);
    const std::string sweep = slurp(dir / "sweep_summary.csv");
    CHECK(sweep.rfind("point,constants.eta_m,horizon,metric,", 0) == 0);
    CHECK(lines(sweep) == 1 + 4 * Metrics::all_names().size());

    REQUIRE(run({"calibrate", "--config", data("minimal.json"), "--targets", data("calibration.json"), "--horizon",
                 "50", "--out", out})
                .code == 0);
    const std::string report = slurp(dir / "calibration_report.csv");
    CHECK(report.rfind("rank,discrepancy,constants.eta_m,", 0) == 0);
    CHECK(lines(report) == 4);
    REQUIRE(run({"calibrate", "--config", data("minimal.json"), "--targets", data("calibration.json"), "--horizon",
                 "50", "--out", out})
                .code == 0);
    CHECK(slurp(dir / "calibration_report.csv") == report);

    CHECK(run({"calibrate", "--config", data("minimal.json"), "--targets", data("calibration.json"), "--budget", "0",
               "--out", out})
              .code == 2);
}

TEST_CASE("unwritable output is a domain error naming the path") {
    const auto dir = fresh_dir("blocked");
    fs::create_directories(dir);
    std::ofstream(dir / "file") << "x";
    const auto r = run({"run", "--config", data("minimal.json"), "--horizon", "5", "--out", (dir / "file").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("file") != std::string::npos);
}
