#include "orgsim/cli.hpp"

#include "orgsim/config.hpp"
#include "orgsim/department_model.hpp"
#include "orgsim/design_dept.hpp"
#include "orgsim/errors.hpp"
#include "orgsim/experiment.hpp"
#include "orgsim/outputs.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <thread>

namespace orgsim {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void schema_error(std::vector<SchemaIssue> issues) {
    std::string msg = "invalid request file";
    for (const auto& i : issues) {
        msg += "\n  " + i.path + ": " + i.reason;
    }
    throw ConfigError(ConfigError::Kind::Schema, msg, std::move(issues));
}

std::optional<std::size_t> positive_count(const json& v) {
    if (v.is_number_integer() && v.get<long long>() >= 1) {
        return static_cast<std::size_t>(v.get<long long>());
    }
    return std::nullopt;
}

}  // namespace

CalibrationSpec parse_calibration_spec(const json& doc) {
    std::vector<SchemaIssue> issues;
    CalibrationSpec spec;
    if (!doc.is_object()) {
        schema_error({{"", "expected an object"}});
    }
    for (const auto& [key, _] : doc.items()) {
        if (key != "parameters" && key != "targets" && key != "replications_per_eval" && key != "budget" &&
            key != "top_k") {
            issues.push_back({key, "unknown field"});
        }
    }
    const auto params = doc.find("parameters");
    if (params == doc.end() || !params->is_object() || params->empty()) {
        issues.push_back({"parameters", "expected at least one parameter range"});
    } else {
        for (const auto& [name, range] : params->items()) {
            if (!range.is_array() || range.size() != 2 || !range[0].is_number() || !range[1].is_number() ||
                range[0].get<double>() > range[1].get<double>()) {
                issues.push_back({"parameters." + name, "expected [lo, hi] with lo <= hi"});
                continue;
            }
            spec.space.push_back({name, range[0].get<double>(), range[1].get<double>()});
        }
    }
    const auto targets = doc.find("targets");
    if (targets == doc.end() || !targets->is_object() || targets->empty()) {
        issues.push_back({"targets", "expected at least one target"});
    } else {
        for (const auto& [name, t] : targets->items()) {
            Target target{name, 0.0, 1.0};
            if (t.is_number()) {
                target.value = t.get<double>();
            } else if (t.is_object() && t.contains("value") && t["value"].is_number()) {
                target.value = t["value"].get<double>();
                if (t.contains("weight")) {
                    if (!t["weight"].is_number() || t["weight"].get<double>() < 0.0) {
                        issues.push_back({"targets." + name + ".weight", "must be >= 0"});
                    } else {
                        target.weight = t["weight"].get<double>();
                    }
                }
            } else {
                issues.push_back({"targets." + name, "expected a number or {\"value\", \"weight\"}"});
                continue;
            }
            spec.targets.push_back(target);
        }
    }
    auto count = [&](std::string_view key, auto apply) {
        if (const auto it = doc.find(key); it != doc.end()) {
            if (auto n = positive_count(*it)) {
                apply(*n);
            } else {
                issues.push_back({std::string(key), "expected an integer >= 1"});
            }
        }
    };
    count("replications_per_eval", [&](std::size_t n) { spec.replications_per_eval = n; });
    count("budget", [&](std::size_t n) { spec.budget = n; });
    count("top_k", [&](std::size_t n) { spec.top_k = n; });
    if (!issues.empty()) {
        schema_error(std::move(issues));
    }
    return spec;
}

SweepSpec parse_sweep_spec(const json& doc) {
    SweepSpec spec;
    std::vector<SchemaIssue> issues;
    const auto params = doc.is_object() ? doc.find("parameters") : doc.end();
    if (!doc.is_object() || params == doc.end() || !params->is_object() || params->empty()) {
        schema_error({{"parameters", "expected at least one parameter"}});
    }
    for (const auto& [name, values] : params->items()) {
        std::vector<double> vs;
        if (values.is_array() && !values.empty()) {
            for (const auto& v : values) {
                if (!v.is_number()) {
                    vs.clear();
                    break;
                }
                vs.push_back(v.get<double>());
            }
        }
        if (vs.empty()) {
            issues.push_back({"parameters." + name, "expected a non-empty array of numbers"});
            continue;
        }
        spec.parameters.push_back(name);
        spec.values.push_back(std::move(vs));
    }
    if (!issues.empty()) {
        schema_error(std::move(issues));
    }
    return spec;
}

std::vector<std::vector<double>> sweep_grid(const SweepSpec& spec) {
    std::vector<std::vector<double>> grid{{}};
    for (const auto& axis : spec.values) {
        std::vector<std::vector<double>> next;
        for (const auto& prefix : grid) {
            for (double v : axis) {
                auto p = prefix;
                p.push_back(v);
                next.push_back(std::move(p));
            }
        }
        grid = std::move(next);
    }
    return grid;
}

namespace {

struct Options {
    std::string config;
    std::string config_b;
    std::uint64_t seed = 1;
    std::size_t replications = 1;
    std::optional<double> horizon;
    std::string out;
    bool trace = false;
    bool events_log = false;
    std::string sweep;
    std::string targets;
    std::optional<std::size_t> budget;
    double alpha = 0.05;
    unsigned threads = 0;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void require(const std::string& value, std::string_view flag, std::string_view command) {
    if (value.empty()) {
        throw UsageError(std::string(command) + " requires " + std::string(flag));
    }
}

ScenarioConfig load_config(const std::string& path, const Options& o) {
    ScenarioConfig cfg = parse_scenario_config(path);
    if (o.horizon) {
        cfg.horizon = *o.horizon;
    }
    return cfg;
}

ReplicationPlan make_plan(const Options& o) { return ReplicationPlan{o.replications, o.seed, true, o.threads}; }

void cmd_run(const Options& o) {
    require(o.config, "--config", "run");
    const ScenarioConfig cfg = load_config(o.config, o);
    const ReplicationPlan plan = make_plan(o);

    RunResult first;
    const auto records = run_replications(
        [&](std::size_t i, std::uint64_t seed) {
            SimulationOptions sim;
            sim.record_event_log = i == 0 && o.events_log;
            sim.record_trace = i == 0 && o.trace;
            RunResult r = simulate(cfg, seed, sim);
            Metrics m = r.metrics;
            if (i == 0) {
                first = std::move(r);
            }
            return m;
        },
        plan);

    const fs::path out(o.out);
    write_file_atomic(out / "run_summary.csv", run_summary_csv(records));
    if (records.size() >= 2) {
        write_file_atomic(out / "run_stats.csv", run_stats_csv(summarize_records(records, Metrics::summary_names(),
                                                                                   o.alpha)));
    }
    if (o.trace) {
        write_file_atomic(out / "agent_trace.csv", agent_trace_csv(first.trace));
    }
    if (o.events_log) {
        write_file_atomic(out / "events.log", events_log_text(first.info));
    }
}

void cmd_compare(const Options& o) {
    require(o.config, "--config", "compare");
    require(o.config_b, "--config-b", "compare");
    const ScenarioConfig a = load_config(o.config, o);
    const ScenarioConfig b = load_config(o.config_b, o);
    const PairedComparison cmp = compare_paired(a, b, make_plan(o), o.alpha);
    write_file_atomic(fs::path(o.out) / "compare_summary.csv", compare_summary_csv(cmp));
}

void cmd_sweep(const Options& o) {
    require(o.config, "--config", "sweep");
    require(o.sweep, "--sweep", "sweep");
    const ScenarioConfig base = load_config(o.config, o);
    const SweepSpec spec = parse_sweep_spec(read_json_file(o.sweep));
    std::vector<SweepPoint> points;
    for (const auto& values : sweep_grid(spec)) {
        std::vector<std::pair<std::string, double>> overrides;
        for (std::size_t i = 0; i < values.size(); ++i) {
            overrides.emplace_back(spec.parameters[i], values[i]);
        }
        const ScenarioConfig cfg = with_overrides(base, overrides);
        const auto records = run_replications(cfg, make_plan(o));
        points.push_back({values, summarize_records(records, Metrics::all_names(), o.alpha)});
    }
    write_file_atomic(fs::path(o.out) / "sweep_summary.csv", sweep_summary_csv(spec.parameters, points));
}

void cmd_calibrate(const Options& o) {
    require(o.config, "--config", "calibrate");
    require(o.targets, "--targets", "calibrate");
    const ScenarioConfig base = load_config(o.config, o);
    const CalibrationSpec spec = parse_calibration_spec(read_json_file(o.targets));
    CalibrationOptions opts;
    opts.budget = o.budget.value_or(spec.budget.value_or(100));
    opts.seed = o.seed;
    opts.top_k = spec.top_k;
    opts.threads = o.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : o.threads;
    const Evaluator eval = make_scenario_evaluator(base, spec.space, spec.replications_per_eval, o.seed, 1);
    const CalibrationResult result = calibrate_search(spec.space, spec.targets, eval, opts);
    write_file_atomic(fs::path(o.out) / "calibration_report.csv", calibration_report_csv(spec.space, result.ranked));
}

void cmd_validate(const Options& o, std::ostream& err) {
    require(o.config, "--config", "validate");
    const ScenarioConfig cfg = load_config(o.config, o);
    for (const auto& chart : {make_designer_chart(cfg.constants), make_coordinator_chart(cfg.constants, "coordinator")}) {
        const auto defects = validate_chart(*chart);
        if (!defects.empty()) {
            std::string msg = "chart '" + chart->name + "' is invalid";
            for (const auto& d : defects) {
                msg += "\n  " + std::string(to_string(d.kind)) + " " + d.subject + ": " + d.detail;
            }
            throw InvalidTransition(msg);
        }
    }
    err << o.config << ": ok\n";
}

std::string default_out_dir() {
    if (const char* env = std::getenv("ORGSIM_OUT"); env != nullptr && *env != '\0') {
        return env;
    }
    return "./out";
}

}  // namespace

int execute_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    o.out = default_out_dir();

    CLI::App app{"Agent-based simulation of a design department", "orgsim"};
    app.require_subcommand(1);
    app.add_option("--config", o.config, "Scenario configuration (JSON)");
    app.add_option("--config-b", o.config_b, "Second scenario for compare (JSON)");
    app.add_option("--seed", o.seed, "Base seed")->capture_default_str();
    app.add_option("--replications", o.replications, "Number of replications")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--horizon", o.horizon, "Simulated hours, overrides the config")->check(CLI::NonNegativeNumber);
    app.add_option("--out", o.out, "Output directory (env ORGSIM_OUT)")->capture_default_str();
    app.add_flag("--trace", o.trace, "Write agent_trace.csv for the first replication");
    app.add_flag("--events-log", o.events_log, "Write events.log for the first replication");
    app.add_option("--sweep", o.sweep, "Sweep request (JSON)");
    app.add_option("--targets", o.targets, "Calibration request (JSON)");
    app.add_option("--budget", o.budget, "Calibration evaluation budget")->check(CLI::PositiveNumber);
    app.add_option("--alpha", o.alpha, "Significance level of confidence intervals")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_option("--threads", o.threads, "Worker threads for replications (0: all cores)")->capture_default_str();

    auto* run = app.add_subcommand("run", "Run replications of one scenario")->fallthrough();
    auto* sweep = app.add_subcommand("sweep", "Run a parameter grid")->fallthrough();
    auto* compare = app.add_subcommand("compare", "Paired comparison of two scenarios")->fallthrough();
    auto* calibrate = app.add_subcommand("calibrate", "Fit parameters to target metrics")->fallthrough();
    auto* validate = app.add_subcommand("validate", "Check a scenario configuration")->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
        if (!(o.alpha > 0.0 && o.alpha < 1.0)) {
            throw UsageError("--alpha must lie strictly between 0 and 1");
        }
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "orgsim: " << e.what() << "\n" << app.help();
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "orgsim: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    try {
        if (run->parsed()) {
            cmd_run(o);
        } else if (sweep->parsed()) {
            cmd_sweep(o);
        } else if (compare->parsed()) {
            cmd_compare(o);
        } else if (calibrate->parsed()) {
            cmd_calibrate(o);
        } else if (validate->parsed()) {
            cmd_validate(o, err);
        }
    } catch (const UsageError& e) {
        err << "orgsim: " << e.what() << "\n" << app.help();
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "orgsim: " << e.what() << "\n";
        return kExitDomainError;
    } catch (const std::exception& e) {
        err << "orgsim: " << e.what() << "\n";
        return kExitDomainError;
    }
    return kExitOk;
}

}  // namespace orgsim
