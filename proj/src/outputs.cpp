#include "orgsim/outputs.hpp"

#include "orgsim/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <system_error>

#include <unistd.h>

namespace orgsim {

std::string format_real(double v) {
    if (v == 0.0) {
        v = 0.0;  // no "-0.000000"
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s = buf;
    if (s == "-0.000000") {
        s = "0.000000";
    }
    return s;
}

namespace {

void stats_cells(std::string& out, const SummaryStats& s) {
    out += std::to_string(s.n) + "," + format_real(s.mean) + "," + format_real(s.sd) + "," + format_real(s.ci_low) +
           "," + format_real(s.ci_high) + "," + format_real(s.alpha);
}

}  // namespace

std::string run_summary_csv(const std::vector<ReplicationRecord>& records) {
    std::string out = "replication,seed";
    for (const auto& name : Metrics::summary_names()) {
        out += "," + name;
    }
    out += "\n";
    for (const auto& r : records) {
        out += std::to_string(r.index) + "," + std::to_string(r.seed);
        for (const auto& name : Metrics::summary_names()) {
            out += "," + format_real(r.metrics.value(name));
        }
        out += "\n";
    }
    return out;
}

std::string run_stats_csv(const std::vector<MetricSummary>& stats) {
    std::string out = "metric,n,mean,sd,ci_low,ci_high,alpha\n";
    for (const auto& m : stats) {
        out += m.metric + ",";
        stats_cells(out, m.stats);
        out += "\n";
    }
    return out;
}

std::string agent_trace_csv(const RunTrace& trace) {
    std::string out = "time,agent_id,attribute,value\n";
    for (const auto& s : trace.samples) {
        out += format_real(s.time) + "," + s.agent.str() + "," + std::string(to_string(s.key)) + "," +
               format_real(s.value) + "\n";
    }
    return out;
}

std::string events_log_text(const RunInfo& info) {
    std::string out;
    for (const auto& line : info.event_log) {
        out += line;
        out += "\n";
    }
    return out;
}

std::string compare_summary_csv(const PairedComparison& cmp) {
    std::string out = "metric,n,mean_a,mean_b,mean_diff,sd_diff,ci_low,ci_high,alpha\n";
    for (const auto& d : cmp.differences) {
        double sum_a = 0.0;
        double sum_b = 0.0;
        for (std::size_t i = 0; i < cmp.a.size(); ++i) {
            sum_a += cmp.a[i].metrics.value(d.metric);
            sum_b += cmp.b[i].metrics.value(d.metric);
        }
        const double n = static_cast<double>(cmp.a.size());
        const SummaryStats& s = d.stats;
        out += d.metric + "," + std::to_string(s.n) + "," + format_real(sum_a / n) + "," + format_real(sum_b / n) +
               "," + format_real(s.mean) + "," + format_real(s.sd) + "," + format_real(s.ci_low) + "," +
               format_real(s.ci_high) + "," + format_real(s.alpha) + "\n";
    }
    return out;
}

std::string sweep_summary_csv(const std::vector<std::string>& parameters, const std::vector<SweepPoint>& points) {
    std::string out = "point";
    for (const auto& p : parameters) {
        out += "," + p;
    }
    out += ",metric,n,mean,sd,ci_low,ci_high,alpha\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::string prefix = std::to_string(i);
        for (double v : points[i].values) {
            prefix += "," + format_real(v);
        }
        for (const auto& m : points[i].stats) {
            out += prefix + "," + m.metric + ",";
            stats_cells(out, m.stats);
            out += "\n";
        }
    }
    return out;
}

std::string calibration_report_csv(const ParamSpace& space, const std::vector<CandidateResult>& ranked) {
    std::string out = "rank,discrepancy";
    for (const auto& p : space) {
        out += "," + p.name;
    }
    for (const auto& name : Metrics::all_names()) {
        out += "," + name;
    }
    out += "\n";
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& c = ranked[i];
        out += std::to_string(i + 1) + "," + format_real(c.discrepancy);
        for (double v : c.params) {
            out += "," + format_real(v);
        }
        for (const auto& name : Metrics::all_names()) {
            const auto it = c.metrics.find(name);
            out += "," + (it != c.metrics.end() ? format_real(it->second) : std::string());
        }
        out += "\n";
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError(path.string() + ": cannot create directory: " + ec.message());
        }
    }
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError(path.string() + ": cannot open for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            fs::remove(tmp, ec);
            throw IoError(path.string() + ": write failed");
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError(path.string() + ": cannot move into place");
    }
}

}  // namespace orgsim
