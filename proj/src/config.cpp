#include "orgsim/config.hpp"

#include "orgsim/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace orgsim {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Range {
    double lo = -kInf;
    double hi = kInf;
    bool lo_open = false;

    bool contains(double v) const { return (lo_open ? v > lo : v >= lo) && v <= hi; }

    std::string reason() const {
        char buf[64];
        if (std::isfinite(hi)) {
            std::snprintf(buf, sizeof buf, "outside [%g,%g]", lo, hi);
        } else {
            std::snprintf(buf, sizeof buf, "must be %s %g", lo_open ? ">" : ">=", lo);
        }
        return buf;
    }
};

constexpr Range kUnit{0.0, 1.0};
constexpr Range kNonNegative{0.0, kInf};
constexpr Range kPositive{0.0, kInf, true};

std::string join(std::string_view path, std::string_view key) {
    return path.empty() ? std::string(key) : std::string(path) + "." + std::string(key);
}

std::string join(std::string_view path, std::size_t index) { return join(path, std::to_string(index)); }

class Reader {
public:
    std::vector<SchemaIssue> issues;

    void issue(std::string path, std::string reason) { issues.push_back({std::move(path), std::move(reason)}); }

    bool object(const json& v, const std::string& path) {
        if (!v.is_object()) {
            issue(path, "expected an object");
            return false;
        }
        return true;
    }

    void known_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
        for (const auto& [key, _] : obj.items()) {
            bool ok = false;
            for (auto a : allowed) {
                ok = ok || a == key;
            }
            if (!ok) {
                issue(join(path, key), "unknown field");
            }
        }
    }

    std::optional<double> number(const json& v, const std::string& path, Range r) {
        if (!v.is_number()) {
            issue(path, "expected a number");
            return std::nullopt;
        }
        const double x = v.get<double>();
        if (!std::isfinite(x) || !r.contains(x)) {
            issue(path, r.reason());
            return std::nullopt;
        }
        return x;
    }

    template <typename T>
    void number_field(const json& obj, const std::string& path, std::string_view key, Range r, T& out) {
        if (const auto it = obj.find(key); it != obj.end()) {
            if (auto x = number(*it, join(path, key), r)) {
                out = static_cast<T>(*x);
            }
        }
    }

    std::optional<int> integer(const json& v, const std::string& path, int lo) {
        if (!v.is_number_integer() || v.get<long long>() < lo) {
            issue(path, "expected an integer >= " + std::to_string(lo));
            return std::nullopt;
        }
        return static_cast<int>(v.get<long long>());
    }

    std::optional<std::string> string(const json& v, const std::string& path) {
        if (!v.is_string()) {
            issue(path, "expected a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    /// `support` bounds where the drawn values may fall.
    std::optional<Distribution> distribution(const json& v, const std::string& path, Range support) {
        if (v.is_number()) {
            if (auto x = number(v, path, support)) {
                return dist::Constant{*x};
            }
            return std::nullopt;
        }
        if (!object(v, path)) {
            return std::nullopt;
        }
        const auto kind_it = v.find("dist");
        if (kind_it == v.end() || !kind_it->is_string()) {
            issue(join(path, "dist"), "missing");
            return std::nullopt;
        }
        const std::string kind = kind_it->get<std::string>();
        auto param = [&](std::string_view key) -> std::optional<double> {
            const auto it = v.find(key);
            if (it == v.end()) {
                issue(join(path, key), "missing");
                return std::nullopt;
            }
            return number(*it, join(path, key), Range{});
        };
        std::optional<Distribution> d;
        if (kind == "constant") {
            known_keys(v, path, {"dist", "value"});
            if (auto x = param("value")) {
                d = dist::Constant{*x};
            }
        } else if (kind == "uniform") {
            known_keys(v, path, {"dist", "a", "b"});
            auto a = param("a");
            auto b = param("b");
            if (a && b) {
                d = dist::Uniform{*a, *b};
            }
        } else if (kind == "exponential") {
            known_keys(v, path, {"dist", "mean"});
            if (auto m = param("mean")) {
                d = dist::Exponential{*m};
            }
        } else if (kind == "triangular") {
            known_keys(v, path, {"dist", "a", "mode", "b"});
            auto a = param("a");
            auto m = param("mode");
            auto b = param("b");
            if (a && m && b) {
                d = dist::Triangular{*a, *m, *b};
            }
        } else if (kind == "bernoulli") {
            known_keys(v, path, {"dist", "p"});
            if (auto p = param("p")) {
                d = dist::Bernoulli{*p};
            }
        } else {
            issue(join(path, "dist"), "unknown distribution '" + kind + "'");
            return std::nullopt;
        }
        if (!d) {
            return std::nullopt;
        }
        try {
            validate_distribution(*d);
        } catch (const BadDistributionParams& e) {
            issue(path, e.what());
            return std::nullopt;
        }
        if (!within_support(*d, support)) {
            issue(path, support.reason());
            return std::nullopt;
        }
        return d;
    }

private:
    static bool within_support(const Distribution& d, Range r) {
        auto in = [&](double x) { return r.contains(x); };
        if (const auto* c = std::get_if<dist::Constant>(&d)) {
            return in(c->value);
        }
        if (const auto* u = std::get_if<dist::Uniform>(&d)) {
            return in(u->a) && in(u->b);
        }
        if (const auto* t = std::get_if<dist::Triangular>(&d)) {
            return in(t->a) && in(t->b);
        }
        if (std::holds_alternative<dist::Exponential>(d)) {
            return !std::isfinite(r.hi) && r.lo <= 0.0;
        }
        return in(0.0) && in(1.0);  // bernoulli
    }
};

Stereotype read_stereotype(Reader& r, const json& v, const std::string& path, const std::string& name,
                           bool partial) {
    Stereotype s;
    s.name = name;
    if (!r.object(v, path)) {
        return s;
    }
    r.known_keys(v, path, {"knowledge", "communication", "productivity", "willingness_to_support",
                           "willingness_to_communicate", "base_productivity"});

    if (const auto it = v.find("knowledge"); it != v.end()) {
        const std::string kpath = join(path, "knowledge");
        if (it->is_object()) {
            r.known_keys(*it, kpath, {"planning", "design", "testing"});
            for (auto c : kKnowledgeCategories) {
                const auto kit = it->find(to_string(c));
                if (kit != it->end()) {
                    s.knowledge[static_cast<std::size_t>(c)] =
                        r.distribution(*kit, join(kpath, to_string(c)), kUnit);
                } else if (!partial) {
                    r.issue(join(kpath, to_string(c)), "missing");
                }
            }
        } else {
            const auto d = r.distribution(*it, kpath, kUnit);
            for (auto& k : s.knowledge) {
                k = d;
            }
        }
    } else if (!partial) {
        r.issue(join(path, "knowledge"), "missing");
    }

    auto level = [&](std::string_view key, std::optional<Distribution>& out) {
        if (const auto it = v.find(key); it != v.end()) {
            out = r.distribution(*it, join(path, key), kUnit);
        } else if (!partial) {
            r.issue(join(path, key), "missing");
        }
    };
    level("communication", s.communication);
    level("productivity", s.productivity);
    level("willingness_to_support", s.willingness_to_support);
    level("willingness_to_communicate", s.willingness_to_communicate);
    level("base_productivity", s.base_productivity);
    return s;
}

void read_constants(Reader& r, const json& v, ScenarioConstants& k) {
    const std::string path = "constants";
    if (!r.object(v, path)) {
        return;
    }
    r.known_keys(v, path,
                 {"eta_m", "eta_p", "eta_k", "kappa_meet", "support_duration", "support_timeout", "meeting_interval",
                  "meeting_duration", "g_supported", "g_unsupported", "cost_base", "cost_skill", "default_teamwork",
                  "meeting_attendance", "attribute_step", "trace_interval"});
    r.number_field(v, path, "eta_m", kNonNegative, k.eta_m);
    r.number_field(v, path, "eta_p", kNonNegative, k.eta_p);
    r.number_field(v, path, "eta_k", kUnit, k.eta_k);
    r.number_field(v, path, "kappa_meet", kNonNegative, k.kappa_meet);
    r.number_field(v, path, "meeting_interval", kNonNegative, k.meeting_interval);
    r.number_field(v, path, "g_supported", kUnit, k.g_supported);
    r.number_field(v, path, "g_unsupported", kUnit, k.g_unsupported);
    r.number_field(v, path, "cost_base", kNonNegative, k.cost_base);
    r.number_field(v, path, "cost_skill", kNonNegative, k.cost_skill);
    r.number_field(v, path, "default_teamwork", kUnit, k.default_teamwork);
    r.number_field(v, path, "meeting_attendance", kUnit, k.meeting_attendance);
    r.number_field(v, path, "attribute_step", kPositive, k.attribute_step);
    r.number_field(v, path, "trace_interval", kPositive, k.trace_interval);
    auto duration = [&](std::string_view key, Distribution& out) {
        if (const auto it = v.find(key); it != v.end()) {
            if (auto d = r.distribution(*it, join(path, key), kNonNegative)) {
                out = *d;
            }
        }
    };
    duration("support_duration", k.support_duration);
    duration("support_timeout", k.support_timeout);
    duration("meeting_duration", k.meeting_duration);
}

void read_department(Reader& r, const json& v, DepartmentConfig& dept) {
    const std::string path = "department";
    if (!r.object(v, path)) {
        return;
    }
    r.known_keys(v, path, {"stereotypes", "manager", "teams"});

    if (const auto it = v.find("stereotypes"); it != v.end() && r.object(*it, join(path, "stereotypes"))) {
        for (const auto& [name, body] : it->items()) {
            dept.stereotypes[name] = read_stereotype(r, body, join(join(path, "stereotypes"), name), name, false);
        }
    } else if (it == v.end()) {
        r.issue(join(path, "stereotypes"), "missing");
    }

    auto stereotype_ref = [&](const json& ref, const std::string& at) -> std::string {
        auto name = r.string(ref, at);
        if (!name) {
            return {};
        }
        if (!dept.stereotypes.contains(*name)) {
            r.issue(at, "unknown stereotype '" + *name + "'");
        }
        return *name;
    };

    if (const auto it = v.find("manager"); it != v.end()) {
        dept.manager_stereotype = stereotype_ref(*it, join(path, "manager"));
    } else {
        r.issue(join(path, "manager"), "missing");
    }

    const auto teams = v.find("teams");
    if (teams == v.end() || !teams->is_array() || teams->empty()) {
        r.issue(join(path, "teams"), "expected at least one team");
        return;
    }
    for (std::size_t t = 0; t < teams->size(); ++t) {
        const json& tv = (*teams)[t];
        const std::string tpath = join(join(path, "teams"), t);
        if (!r.object(tv, tpath)) {
            continue;
        }
        r.known_keys(tv, tpath, {"supervisor", "designers"});
        TeamConfig team;
        if (const auto it = tv.find("supervisor"); it != tv.end()) {
            team.supervisor_stereotype = stereotype_ref(*it, join(tpath, "supervisor"));
        } else {
            r.issue(join(tpath, "supervisor"), "missing");
        }
        const auto designers = tv.find("designers");
        if (designers == tv.end() || !designers->is_array() || designers->empty()) {
            r.issue(join(tpath, "designers"), "expected at least one designer");
        } else {
            for (std::size_t i = 0; i < designers->size(); ++i) {
                const json& dv = (*designers)[i];
                const std::string dpath = join(join(tpath, "designers"), i);
                DesignerSlot slot;
                if (dv.is_string()) {
                    slot.stereotype = stereotype_ref(dv, dpath);
                } else if (r.object(dv, dpath)) {
                    r.known_keys(dv, dpath, {"stereotype", "count", "overrides"});
                    if (const auto it = dv.find("stereotype"); it != dv.end()) {
                        slot.stereotype = stereotype_ref(*it, join(dpath, "stereotype"));
                    } else {
                        r.issue(join(dpath, "stereotype"), "missing");
                    }
                    if (const auto it = dv.find("count"); it != dv.end()) {
                        slot.count = r.integer(*it, join(dpath, "count"), 1).value_or(1);
                    }
                    if (const auto it = dv.find("overrides"); it != dv.end()) {
                        slot.overrides = read_stereotype(r, *it, join(dpath, "overrides"), slot.stereotype, true);
                    }
                }
                team.designers.push_back(std::move(slot));
            }
        }
        dept.teams.push_back(std::move(team));
    }
}

std::optional<KnowledgeCategory> read_category(Reader& r, const json& v, const std::string& path) {
    auto name = r.string(v, path);
    if (!name) {
        return std::nullopt;
    }
    auto c = parse_category(*name);
    if (!c) {
        r.issue(path, "unknown category '" + *name + "'");
    }
    return c;
}

void read_contracts(Reader& r, const json& v, ContractsConfig& contracts) {
    const std::string path = "contracts";
    if (!r.object(v, path)) {
        return;
    }
    r.known_keys(v, path, {"explicit", "arrivals"});

    if (const auto list = v.find("explicit"); list != v.end()) {
        if (!list->is_array()) {
            r.issue(join(path, "explicit"), "expected an array");
        } else {
            std::set<std::string> ids;
            for (std::size_t i = 0; i < list->size(); ++i) {
                const json& cv = (*list)[i];
                const std::string cpath = join(join(path, "explicit"), i);
                if (!r.object(cv, cpath)) {
                    continue;
                }
                r.known_keys(cv, cpath, {"id", "arrival_time", "deadline", "teamwork", "activities"});
                ContractSpec c;
                c.id = "c" + std::to_string(i);
                if (const auto it = cv.find("id"); it != cv.end()) {
                    c.id = r.string(*it, join(cpath, "id")).value_or(c.id);
                }
                if (!ids.insert(c.id).second) {
                    r.issue(join(cpath, "id"), "duplicate contract id '" + c.id + "'");
                }
                r.number_field(cv, cpath, "arrival_time", kNonNegative, c.arrival_time);
                if (cv.contains("deadline")) {
                    r.number_field(cv, cpath, "deadline", kNonNegative, c.deadline);
                    if (!(c.deadline > c.arrival_time)) {
                        r.issue(join(cpath, "deadline"), "must be after arrival_time");
                    }
                } else {
                    r.issue(join(cpath, "deadline"), "missing");
                }
                if (const auto it = cv.find("teamwork"); it != cv.end()) {
                    c.teamwork = r.number(*it, join(cpath, "teamwork"), kUnit);
                }
                const auto acts = cv.find("activities");
                if (acts == cv.end() || !acts->is_array() || acts->empty()) {
                    r.issue(join(cpath, "activities"), "expected at least one activity");
                } else {
                    for (std::size_t a = 0; a < acts->size(); ++a) {
                        const json& av = (*acts)[a];
                        const std::string apath = join(join(cpath, "activities"), a);
                        if (!r.object(av, apath)) {
                            continue;
                        }
                        r.known_keys(av, apath, {"category", "effort", "required_knowledge"});
                        ActivitySpec spec;
                        if (const auto it = av.find("category"); it != av.end()) {
                            spec.category = read_category(r, *it, join(apath, "category")).value_or(spec.category);
                        } else {
                            r.issue(join(apath, "category"), "missing");
                        }
                        if (av.contains("effort")) {
                            r.number_field(av, apath, "effort", kPositive, spec.effort);
                        } else {
                            r.issue(join(apath, "effort"), "missing");
                        }
                        r.number_field(av, apath, "required_knowledge", kUnit, spec.required_knowledge);
                        c.activities.push_back(spec);
                    }
                }
                contracts.explicit_contracts.push_back(std::move(c));
            }
        }
    }

    if (const auto av = v.find("arrivals"); av != v.end()) {
        const std::string apath = join(path, "arrivals");
        if (!r.object(*av, apath)) {
            return;
        }
        r.known_keys(*av, apath,
                     {"rate", "start", "deadline_offset", "teamwork", "activities_per_contract", "templates"});
        ArrivalProcess arr;
        if (av->contains("rate")) {
            r.number_field(*av, apath, "rate", kNonNegative, arr.rate);
        } else {
            r.issue(join(apath, "rate"), "missing");
        }
        r.number_field(*av, apath, "start", kNonNegative, arr.start);
        if (const auto it = av->find("deadline_offset"); it != av->end()) {
            if (auto d = r.distribution(*it, join(apath, "deadline_offset"), kNonNegative)) {
                arr.deadline_offset = *d;
            }
        }
        if (const auto it = av->find("teamwork"); it != av->end()) {
            arr.teamwork = r.number(*it, join(apath, "teamwork"), kUnit);
        }
        if (const auto it = av->find("activities_per_contract"); it != av->end()) {
            arr.activities_per_contract = r.integer(*it, join(apath, "activities_per_contract"), 1).value_or(1);
        }
        const auto templates = av->find("templates");
        if (templates == av->end() || !templates->is_array() || templates->empty()) {
            r.issue(join(apath, "templates"), "expected at least one template");
        } else {
            for (std::size_t i = 0; i < templates->size(); ++i) {
                const json& tv = (*templates)[i];
                const std::string tpath = join(join(apath, "templates"), i);
                if (!r.object(tv, tpath)) {
                    continue;
                }
                r.known_keys(tv, tpath, {"weight", "category", "effort", "required_knowledge"});
                ActivityTemplate t;
                r.number_field(tv, tpath, "weight", kPositive, t.weight);
                if (const auto it = tv.find("category"); it != tv.end()) {
                    t.category = read_category(r, *it, join(tpath, "category")).value_or(t.category);
                } else {
                    r.issue(join(tpath, "category"), "missing");
                }
                if (const auto it = tv.find("effort"); it != tv.end()) {
                    if (auto d = r.distribution(*it, join(tpath, "effort"), kNonNegative)) {
                        t.effort = *d;
                    }
                } else {
                    r.issue(join(tpath, "effort"), "missing");
                }
                if (const auto it = tv.find("required_knowledge"); it != tv.end()) {
                    if (auto d = r.distribution(*it, join(tpath, "required_knowledge"), kUnit)) {
                        t.required_knowledge = *d;
                    }
                }
                arr.templates.push_back(std::move(t));
            }
        }
        contracts.arrivals = std::move(arr);
    }
}

std::string summarize_issues(const std::vector<SchemaIssue>& issues) {
    std::string msg = "invalid scenario configuration (" + std::to_string(issues.size()) + " issue" +
                      (issues.size() == 1 ? "" : "s") + ")";
    for (const auto& i : issues) {
        msg += "\n  " + i.path + ": " + i.reason;
    }
    return msg;
}

}  // namespace

ScenarioConfig parse_scenario_json(const json& doc) {
    Reader r;
    ScenarioConfig cfg;
    if (!r.object(doc, "")) {
        throw ConfigError(ConfigError::Kind::Schema, summarize_issues(r.issues), r.issues);
    }
    r.known_keys(doc, "", {"horizon", "constants", "department", "contracts"});
    r.number_field(doc, "", "horizon", kNonNegative, cfg.horizon);
    if (const auto it = doc.find("constants"); it != doc.end()) {
        read_constants(r, *it, cfg.constants);
    }
    if (const auto it = doc.find("department"); it != doc.end()) {
        read_department(r, *it, cfg.department);
    } else {
        r.issue("department", "missing");
    }
    if (const auto it = doc.find("contracts"); it != doc.end()) {
        read_contracts(r, *it, cfg.contracts);
    }
    if (!r.issues.empty()) {
        throw ConfigError(ConfigError::Kind::Schema, summarize_issues(r.issues), r.issues);
    }
    return cfg;
}

namespace {

json parse_json_text(std::string_view text, std::string_view origin) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        for (std::size_t i = 0; i + 1 < upto; ++i) {
            line += text[i] == '\n' ? 1 : 0;
        }
        std::string msg = std::string(origin) + ": syntax error at line " + std::to_string(line);
        throw ConfigError(ConfigError::Kind::Syntax, msg, {{"line " + std::to_string(line), e.what()}});
    }
}

}  // namespace

ScenarioConfig parse_scenario_text(std::string_view text) {
    return parse_scenario_json(parse_json_text(text, "config"));
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError(ConfigError::Kind::FileNotFound, "cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_json_text(buf.str(), path.string());
}

ScenarioConfig parse_scenario_config(const std::filesystem::path& path) {
    return parse_scenario_json(read_json_file(path));
}

json distribution_to_json(const Distribution& d) {
    if (const auto* c = std::get_if<dist::Constant>(&d)) {
        return c->value;
    }
    if (const auto* u = std::get_if<dist::Uniform>(&d)) {
        return {{"dist", "uniform"}, {"a", u->a}, {"b", u->b}};
    }
    if (const auto* e = std::get_if<dist::Exponential>(&d)) {
        return {{"dist", "exponential"}, {"mean", e->mean}};
    }
    if (const auto* t = std::get_if<dist::Triangular>(&d)) {
        return {{"dist", "triangular"}, {"a", t->a}, {"mode", t->mode}, {"b", t->b}};
    }
    const auto& b = std::get<dist::Bernoulli>(d);
    return {{"dist", "bernoulli"}, {"p", b.p}};
}

namespace {

json stereotype_to_json(const Stereotype& s) {
    json out = json::object();
    json knowledge = json::object();
    for (auto c : kKnowledgeCategories) {
        if (const auto& k = s.knowledge[static_cast<std::size_t>(c)]) {
            knowledge[std::string(to_string(c))] = distribution_to_json(*k);
        }
    }
    if (!knowledge.empty()) {
        out["knowledge"] = knowledge;
    }
    auto put = [&](std::string_view key, const std::optional<Distribution>& d) {
        if (d) {
            out[std::string(key)] = distribution_to_json(*d);
        }
    };
    put("communication", s.communication);
    put("productivity", s.productivity);
    put("willingness_to_support", s.willingness_to_support);
    put("willingness_to_communicate", s.willingness_to_communicate);
    put("base_productivity", s.base_productivity);
    return out;
}

}  // namespace

json to_json(const ScenarioConfig& cfg) {
    const ScenarioConstants& k = cfg.constants;
    json doc;
    doc["horizon"] = cfg.horizon;
    doc["constants"] = {
        {"eta_m", k.eta_m},
        {"eta_p", k.eta_p},
        {"eta_k", k.eta_k},
        {"kappa_meet", k.kappa_meet},
        {"support_duration", distribution_to_json(k.support_duration)},
        {"support_timeout", distribution_to_json(k.support_timeout)},
        {"meeting_interval", k.meeting_interval},
        {"meeting_duration", distribution_to_json(k.meeting_duration)},
        {"g_supported", k.g_supported},
        {"g_unsupported", k.g_unsupported},
        {"cost_base", k.cost_base},
        {"cost_skill", k.cost_skill},
        {"default_teamwork", k.default_teamwork},
        {"meeting_attendance", k.meeting_attendance},
        {"attribute_step", k.attribute_step},
        {"trace_interval", k.trace_interval},
    };

    json stereotypes = json::object();
    for (const auto& [name, s] : cfg.department.stereotypes) {
        stereotypes[name] = stereotype_to_json(s);
    }
    json teams = json::array();
    for (const auto& t : cfg.department.teams) {
        json designers = json::array();
        for (const auto& slot : t.designers) {
            json d = {{"stereotype", slot.stereotype}, {"count", slot.count}};
            json overrides = stereotype_to_json(slot.overrides);
            if (!overrides.empty()) {
                d["overrides"] = overrides;
            }
            designers.push_back(d);
        }
        teams.push_back({{"supervisor", t.supervisor_stereotype}, {"designers", designers}});
    }
    doc["department"] = {
        {"stereotypes", stereotypes}, {"manager", cfg.department.manager_stereotype}, {"teams", teams}};

    json contracts = json::object();
    json list = json::array();
    for (const auto& c : cfg.contracts.explicit_contracts) {
        json acts = json::array();
        for (const auto& a : c.activities) {
            acts.push_back({{"category", std::string(to_string(a.category))},
                            {"effort", a.effort},
                            {"required_knowledge", a.required_knowledge}});
        }
        json cj = {{"id", c.id}, {"arrival_time", c.arrival_time}, {"deadline", c.deadline}, {"activities", acts}};
        if (c.teamwork) {
            cj["teamwork"] = *c.teamwork;
        }
        list.push_back(cj);
    }
    contracts["explicit"] = list;
    if (const auto& arr = cfg.contracts.arrivals) {
        json templates = json::array();
        for (const auto& t : arr->templates) {
            templates.push_back({{"weight", t.weight},
                                 {"category", std::string(to_string(t.category))},
                                 {"effort", distribution_to_json(t.effort)},
                                 {"required_knowledge", distribution_to_json(t.required_knowledge)}});
        }
        json aj = {{"rate", arr->rate},
                   {"start", arr->start},
                   {"deadline_offset", distribution_to_json(arr->deadline_offset)},
                   {"activities_per_contract", arr->activities_per_contract},
                   {"templates", templates}};
        if (arr->teamwork) {
            aj["teamwork"] = *arr->teamwork;
        }
        contracts["arrivals"] = aj;
    }
    doc["contracts"] = contracts;
    return doc;
}

namespace {

json* resolve_path(json& doc, std::string_view path) {
    json* node = &doc;
    std::size_t pos = 0;
    while (pos <= path.size()) {
        const std::size_t dot = path.find('.', pos);
        const std::string key(path.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos));
        if (node->is_object()) {
            const auto it = node->find(key);
            if (it == node->end()) {
                return nullptr;
            }
            node = &*it;
        } else if (node->is_array()) {
            std::size_t index = 0;
            const auto [end, ec] = std::from_chars(key.data(), key.data() + key.size(), index);
            if (ec != std::errc{} || end != key.data() + key.size() || index >= node->size()) {
                return nullptr;
            }
            node = &(*node)[index];
        } else {
            return nullptr;
        }
        if (dot == std::string_view::npos) {
            break;
        }
        pos = dot + 1;
    }
    return node;
}

[[noreturn]] void bad_path(std::string_view path, std::string reason) {
    std::vector<SchemaIssue> issues{{std::string(path), reason}};
    throw ConfigError(ConfigError::Kind::Schema, std::string(path) + ": " + reason, issues);
}

}  // namespace

void set_config_value(json& doc, std::string_view path, double value) {
    json* node = resolve_path(doc, path);
    if (node == nullptr) {
        bad_path(path, "no such config path");
    }
    if (!node->is_number()) {
        bad_path(path, "not a numeric field");
    }
    if (node->is_number_integer() && std::floor(value) == value) {
        *node = static_cast<long long>(value);
    } else {
        *node = value;
    }
}

double get_config_value(const json& doc, std::string_view path) {
    const json* node = resolve_path(const_cast<json&>(doc), path);
    if (node == nullptr) {
        bad_path(path, "no such config path");
    }
    if (!node->is_number()) {
        bad_path(path, "not a numeric field");
    }
    return node->get<double>();
}

ScenarioConfig with_overrides(const ScenarioConfig& config,
                              const std::vector<std::pair<std::string, double>>& overrides) {
    json doc = to_json(config);
    for (const auto& [path, value] : overrides) {
        set_config_value(doc, path, value);
    }
    return parse_scenario_json(doc);
}

}  // namespace orgsim
