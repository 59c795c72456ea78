#include "trigs/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace trigs {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
        throw ConfigError(key, key + ": '" + text + "' is not a number");
    return v;
}

long parse_long(const std::string& key, const std::string& text) {
    const double v = parse_double(key, text);
    if (v != static_cast<double>(static_cast<long>(v)))
        throw ConfigError(key, key + ": '" + text + "' is not an integer");
    return static_cast<long>(v);
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(parse_double(key, item));
    }
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_double(v[i]);
    }
    return s;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "problem", "p",       "c0",        "t0",        "delta",     "lambda", "a",
        "c",       "t-end",   "rel-tol",   "abs-tol",   "min-step",  "samples", "fixed-step",
        "grid",    "max-steps", "x0",      "v0",        "theta",     "viscosity-tol"};
    return keys;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (key == "problem") cfg.problem = value;
    else if (key == "p") cfg.p = parse_double(key, value);
    else if (key == "c0") cfg.c0 = parse_double(key, value);
    else if (key == "t0") cfg.t0 = parse_double(key, value);
    else if (key == "delta") cfg.delta = parse_double(key, value);
    else if (key == "lambda") {
        if (value == "auto") cfg.lambda.reset();
        else cfg.lambda = parse_double(key, value);
    } else if (key == "a") cfg.a = parse_double(key, value);
    else if (key == "c") cfg.c = parse_double(key, value);
    else if (key == "t-end") cfg.t_end = parse_double(key, value);
    else if (key == "rel-tol") cfg.control.rel_tol = parse_double(key, value);
    else if (key == "abs-tol") cfg.control.abs_tol = parse_double(key, value);
    else if (key == "min-step") cfg.control.min_step = parse_double(key, value);
    else if (key == "samples") cfg.control.samples = static_cast<int>(parse_long(key, value));
    else if (key == "fixed-step") {
        if (value == "none" || value.empty()) cfg.control.fixed_step.reset();
        else cfg.control.fixed_step = parse_double(key, value);
    } else if (key == "grid") {
        if (value == "log") cfg.control.grid = SampleGrid::log_spaced;
        else if (value == "linear") cfg.control.grid = SampleGrid::linear;
        else throw ConfigError(key, "grid must be 'log' or 'linear'");
    } else if (key == "max-steps") cfg.control.max_steps = parse_long(key, value);
    else if (key == "x0") cfg.x0 = parse_list(key, value);
    else if (key == "v0") cfg.v0 = parse_list(key, value);
    else if (key == "theta") cfg.theta = parse_double(key, value);
    else if (key == "viscosity-tol") cfg.viscosity_tol = parse_double(key, value);
    else throw ConfigError(key, "unknown key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config", "line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (std::find(config_keys().begin(), config_keys().end(), key) == config_keys().end())
            throw ConfigError(key, "unknown key '" + key + "' on line " + std::to_string(lineno));
        out.emplace_back(key, trim(line.substr(eq + 1)));
    }
    return out;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    for (const auto& [k, v] : parse_config_text(text.str())) apply_setting(base, k, v);
    return base;
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& cfg) {
    std::string lambda = "auto";
    try {
        lambda = format_double(cfg.lyapunov_params().lambda);
    } catch (const ConfigError&) {
        if (cfg.lambda) lambda = format_double(*cfg.lambda);
    }
    return {
        {"problem", cfg.problem},
        {"p", format_double(cfg.p)},
        {"c0", format_double(cfg.c0)},
        {"t0", format_double(cfg.t0)},
        {"delta", format_double(cfg.delta)},
        {"lambda", lambda},
        {"a", format_double(cfg.a)},
        {"c", format_double(cfg.c)},
        {"t-end", format_double(cfg.t_end)},
        {"rel-tol", format_double(cfg.control.rel_tol)},
        {"abs-tol", format_double(cfg.control.abs_tol)},
        {"min-step", format_double(cfg.control.min_step)},
        {"samples", std::to_string(cfg.control.samples)},
        {"fixed-step", cfg.control.fixed_step ? format_double(*cfg.control.fixed_step) : "none"},
        {"grid", cfg.control.grid == SampleGrid::linear ? "linear" : "log"},
        {"max-steps", std::to_string(cfg.control.max_steps)},
        {"x0", join(cfg.x0)},
        {"v0", join(cfg.v0)},
        {"theta", format_double(cfg.theta)},
        {"viscosity-tol", format_double(cfg.viscosity_tol)},
    };
}

}  // namespace trigs
