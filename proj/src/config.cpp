#include "thermo/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "json.hpp"
#include "thermo/bath.hpp"

namespace thermo {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& message) {
    throw validation_error(field, message);
}

void check_keys(const json& obj, const std::string& prefix,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) {
            const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
            fail(path, "unknown configuration key '" + path + "'");
        }
    }
}

const json& member(const json& obj, const char* key) { return obj.at(key); }

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

std::uint64_t as_count(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<double>() < 0) fail(path, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

std::vector<double> as_number_array(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(as_number(e, path));
    return out;
}

const json* group(const json& root, const char* key, const std::string& path) {
    if (!root.contains(key)) return nullptr;
    const json& g = root.at(key);
    if (!g.is_object()) fail(path, "expected an object");
    return &g;
}

} // namespace

RunConfig parse_run_config_text(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail("config", std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) fail("config", "top level must be a JSON object");
    check_keys(root, "", {"schema_version", "bath", "prior", "strategy", "detector", "run"});

    if (!root.contains("schema_version")) fail("schema_version", "missing schema_version");
    if (!root.at("schema_version").is_number_integer() ||
        root.at("schema_version").get<int>() != kConfigSchemaVersion)
        fail("schema_version", "unsupported schema_version (this build reads version " +
                                   std::to_string(kConfigSchemaVersion) + ")");

    RunConfig cfg;
    if (const json* b = group(root, "bath", "bath")) {
        check_keys(*b, "bath", {"kind", "coupling"});
        if (b->contains("kind")) cfg.bath_kind = as_string(member(*b, "kind"), "bath.kind");
        if (b->contains("coupling"))
            cfg.coupling = as_number(member(*b, "coupling"), "bath.coupling");
    }
    if (const json* p = group(root, "prior", "prior")) {
        check_keys(*p, "prior", {"tmin", "tmax", "nodes", "spacing"});
        if (p->contains("tmin")) cfg.t_min = as_number(member(*p, "tmin"), "prior.tmin");
        if (p->contains("tmax")) cfg.t_max = as_number(member(*p, "tmax"), "prior.tmax");
        if (p->contains("nodes")) cfg.nodes = as_count(member(*p, "nodes"), "prior.nodes");
        if (p->contains("spacing"))
            cfg.spacing = as_string(member(*p, "spacing"), "prior.spacing");
    }
    if (const json* s = group(root, "strategy", "strategy")) {
        check_keys(*s, "strategy", {"mode", "update_interval"});
        if (s->contains("mode")) cfg.strategy = as_string(member(*s, "mode"), "strategy.mode");
        if (s->contains("update_interval"))
            cfg.update_interval =
                as_number(member(*s, "update_interval"), "strategy.update_interval");
    }
    if (const json* d = group(root, "detector", "detector")) {
        check_keys(*d, "detector", {"lambda", "gamma", "dt"});
        cfg.has_detector = true;
        if (d->contains("lambda")) cfg.lambda = as_number(member(*d, "lambda"), "detector.lambda");
        if (d->contains("gamma")) cfg.gamma = as_number(member(*d, "gamma"), "detector.gamma");
        if (d->contains("dt")) cfg.dt = as_number(member(*d, "dt"), "detector.dt");
    }
    if (const json* r = group(root, "run", "run")) {
        check_keys(*r, "run",
                   {"tau", "gap", "temperature", "n_trajectories", "seed", "sample_times",
                    "true_temperatures"});
        if (r->contains("tau")) cfg.tau = as_number(member(*r, "tau"), "run.tau");
        if (r->contains("gap")) cfg.gap = as_number(member(*r, "gap"), "run.gap");
        if (r->contains("temperature"))
            cfg.temperature = as_number(member(*r, "temperature"), "run.temperature");
        if (r->contains("n_trajectories"))
            cfg.n_trajectories = as_count(member(*r, "n_trajectories"), "run.n_trajectories");
        if (r->contains("seed")) cfg.seed = as_count(member(*r, "seed"), "run.seed");
        if (r->contains("sample_times"))
            cfg.sample_times = as_number_array(member(*r, "sample_times"), "run.sample_times");
        if (r->contains("true_temperatures"))
            cfg.true_temperatures =
                as_number_array(member(*r, "true_temperatures"), "run.true_temperatures");
    }
    return cfg;
}

RunConfig parse_run_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("config", "cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_run_config_text(buffer.str());
}

} // namespace thermo
