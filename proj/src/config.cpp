#include "gammachan/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "gammachan/errors.hpp"

namespace gammachan {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

double parse_double(const std::string& field, const std::string& text) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size()) {
        throw ConfigError(field + ": expected a number, got '" + text + "'");
    }
    return v;
}

std::uint64_t parse_u64(const std::string& field, const std::string& text) {
    const std::string t = trim(text);
    char* end = nullptr;
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size() || t[0] == '-') {
        throw ConfigError(field + ": expected a nonnegative integer, got '" + text + "'");
    }
    return v;
}

std::vector<double> parse_list(const std::string& field, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(parse_double(field, item));
    }
    if (out.empty()) {
        throw ConfigError(field + ": expected a comma-separated list, got '" + text + "'");
    }
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt(v[i]);
    }
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string& field,
                                  const std::string& value)>;

// one registry drives INI parsing, env overrides, and therefore keeps the two
// spellings of every key in lockstep
const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> reg = {
        {"channel.alphas",
         [](ExperimentConfig& c, const std::string& f, const std::string& v) {
             c.alphas = parse_list(f, v);
         }},
        {"channel.lambda",
         [](ExperimentConfig& c, const std::string& f, const std::string& v) {
             c.lambda = parse_double(f, v);
         }},
        {"channel.r_min",
         [](ExperimentConfig& c, const std::string& f, const std::string& v) {
             c.r.min = parse_double(f, v);
         }},
        {"channel.r_max",
         [](ExperimentConfig& c, const std::string& f, const std::string& v) {
             c.r.max = parse_double(f, v);
         }},
        {"channel.r_count",
         [](ExperimentConfig& c, const std::string& f, const std::string& v) {
             c.r.count = static_cast<std::size_t>(parse_u64(f, v));
         }},
        {"channel.r_spacing",
         [](ExperimentConfig& c, const std::string&, const std::string& v) {
             c.r.spacing = trim(v);
         }},
        {"input.kind",
         [](ExperimentConfig& c, const std::string&, const std::string& v) {
             c.input.kind = trim(v);
         }},
        {"input.shape",
         [](ExperimentConfig& c, const std::string& f, const std::string& v) {
             c.input.shape = parse_double(f, v);
         }},
        {"input.rate",
         [](ExperimentConfig& c, const std::string& f, const std::string& v) {
             c.input.rate = parse_double(f, v);
         }},
        {"input.weights",
         [](ExperimentConfig& c, const std::string& f, const std::string& v) {
             c.input.weights = parse_list(f, v);
         }},
        {"input.shapes",
         [](ExperimentConfig& c, const std::string& f, const std::string& v) {
             c.input.shapes = parse_list(f, v);
         }},
        {"input.rates",
         [](ExperimentConfig& c, const std::string& f, const std::string& v) {
             c.input.rates = parse_list(f, v);
         }},
        {"input.mu",
         [](ExperimentConfig& c, const std::string& f, const std::string& v) {
             c.input.mu = parse_double(f, v);
         }},
        {"input.sigma",
         [](ExperimentConfig& c, const std::string& f, const std::string& v) {
             c.input.sigma = parse_double(f, v);
         }},
        {"estimation.mc_samples",
         [](ExperimentConfig& c, const std::string& f, const std::string& v) {
             c.estimation.mc_samples = static_cast<std::size_t>(parse_u64(f, v));
         }},
        {"estimation.bins",
         [](ExperimentConfig& c, const std::string& f, const std::string& v) {
             c.estimation.bins = static_cast<std::size_t>(parse_u64(f, v));
         }},
        {"estimation.seed",
         [](ExperimentConfig& c, const std::string& f, const std::string& v) {
             c.estimation.seed = parse_u64(f, v);
         }},
        {"estimation.fd_step_rule",
         [](ExperimentConfig& c, const std::string&, const std::string& v) {
             c.estimation.fd_step_rule = trim(v);
         }},
        {"estimation.quad_rel_tol",
         [](ExperimentConfig& c, const std::string& f, const std::string& v) {
             c.estimation.quad_rel_tol = parse_double(f, v);
         }},
        {"outputs.csv_path",
         [](ExperimentConfig& c, const std::string&, const std::string& v) {
             c.outputs.csv_path = trim(v);
         }},
        {"outputs.json_path",
         [](ExperimentConfig& c, const std::string&, const std::string& v) {
             c.outputs.json_path = trim(v);
         }},
    };
    return reg;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": malformed section header '" + t + "'");
            }
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected 'key = value', got '" + t + "'");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        const std::string field = section.empty() ? key : section + "." + key;
        const auto it = setters().find(field);
        if (it == setters().end()) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key '" +
                              field + "'");
        }
        it->second(cfg, field, value);
    }
    return cfg;
}

void apply_env_overrides(ExperimentConfig& cfg) {
    for (const auto& [field, setter] : setters()) {
        std::string env_name = "GAMMACHAN_" + upper(field);
        std::replace(env_name.begin(), env_name.end(), '.', '_');
        if (const char* v = std::getenv(env_name.c_str())) {
            setter(cfg, field + " (from " + env_name + ")", v);
        }
    }
}

ExperimentConfig load_config(const std::string& path) {
    ExperimentConfig cfg;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot open config file '" + path + "'");
        }
        std::stringstream buf;
        buf << in.rdbuf();
        cfg = parse_config_text(buf.str(), path);
    }
    apply_env_overrides(cfg);
    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const {
    if (alphas.empty()) {
        throw ConfigError("channel.alphas: at least one alpha is required");
    }
    for (double a : alphas) {
        if (!std::isfinite(a) || a < 0.5) {
            throw ConfigError("channel.alphas: alpha = " + fmt(a) +
                              " rejected; the channel is defined for alpha >= 1/2");
        }
    }
    if (!std::isfinite(lambda) || lambda <= 0.0) {
        throw ConfigError("channel.lambda: must be positive and finite");
    }
    if (r.count == 0) {
        throw ConfigError("channel.r_count: the r grid must not be empty");
    }
    if (!std::isfinite(r.min) || r.min < 0.0) {
        throw ConfigError("channel.r_min: must be >= 0");
    }
    if (r.count > 1 && !(r.max > r.min)) {
        throw ConfigError("channel.r_max: grid must be strictly increasing (r_max > r_min)");
    }
    if (r.spacing != "linear" && r.spacing != "log") {
        throw ConfigError("channel.r_spacing: must be 'linear' or 'log'");
    }
    if (r.spacing == "log" && !(r.min > 0.0)) {
        throw ConfigError("channel.r_min: log spacing needs r_min > 0");
    }
    if (input.kind == "gamma") {
        if (!(input.shape > 0.0) || !(input.rate > 0.0)) {
            throw ConfigError("input.shape/input.rate: gamma input needs positive parameters");
        }
    } else if (input.kind == "exponential") {
        if (!(input.rate > 0.0)) {
            throw ConfigError("input.rate: exponential input needs a positive rate");
        }
    } else if (input.kind == "mixture") {
        if (input.weights.size() != input.shapes.size() ||
            input.weights.size() != input.rates.size() || input.weights.empty()) {
            throw ConfigError(
                "input.weights/input.shapes/input.rates: must be nonempty lists of equal length");
        }
        double wsum = 0.0;
        for (double w : input.weights) {
            if (!(w > 0.0)) throw ConfigError("input.weights: weights must be positive");
            wsum += w;
        }
        if (std::fabs(wsum - 1.0) > 1e-9) {
            throw ConfigError("input.weights: must sum to 1 (got " + fmt(wsum) + ")");
        }
        for (double v : input.shapes) {
            if (!(v > 0.0)) throw ConfigError("input.shapes: shapes must be positive");
        }
        for (double v : input.rates) {
            if (!(v > 0.0)) throw ConfigError("input.rates: rates must be positive");
        }
    } else if (input.kind == "lognormal") {
        if (!std::isfinite(input.mu)) throw ConfigError("input.mu: must be finite");
        if (!(input.sigma > 0.0)) throw ConfigError("input.sigma: must be positive");
    } else {
        throw ConfigError("input.kind: unknown kind '" + input.kind +
                          "' (gamma | exponential | mixture | lognormal)");
    }
    if (estimation.mc_samples < 10000) {
        throw ConfigError("estimation.mc_samples: must be at least 10000");
    }
    if (estimation.bins != 0 && estimation.bins < 10) {
        throw ConfigError("estimation.bins: must be 0 (auto) or at least 10");
    }
    if (estimation.fd_step_rule != "richardson" && estimation.fd_step_rule != "plain") {
        throw ConfigError("estimation.fd_step_rule: must be 'richardson' or 'plain'");
    }
    if (!(estimation.quad_rel_tol > 0.0) || estimation.quad_rel_tol > 1e-6) {
        throw ConfigError("estimation.quad_rel_tol: must be in (0, 1e-6]");
    }
    if (outputs.csv_path.empty() || outputs.json_path.empty()) {
        throw ConfigError("outputs.csv_path/outputs.json_path: must be nonempty");
    }
}

std::vector<double> ExperimentConfig::r_grid() const {
    std::vector<double> grid;
    grid.reserve(r.count);
    if (r.count == 1) {
        grid.push_back(r.min);
        return grid;
    }
    for (std::size_t i = 0; i < r.count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(r.count - 1);
        if (r.spacing == "log") {
            grid.push_back(std::exp(std::log(r.min) + t * (std::log(r.max) - std::log(r.min))));
        } else {
            grid.push_back(r.min + t * (r.max - r.min));
        }
    }
    grid.front() = r.min;
    grid.back() = r.max;
    return grid;
}

InputDistribution ExperimentConfig::make_input() const {
    if (input.kind == "gamma") {
        return InputDistribution::gamma(input.shape, input.rate);
    }
    if (input.kind == "exponential") {
        return InputDistribution::exponential(input.rate);
    }
    if (input.kind == "mixture") {
        std::vector<GammaParams> comps;
        comps.reserve(input.shapes.size());
        for (std::size_t i = 0; i < input.shapes.size(); ++i) {
            comps.push_back({input.shapes[i], input.rates[i]});
        }
        return InputDistribution::gamma_mixture(input.weights, std::move(comps));
    }
    return InputDistribution::log_normal(input.mu, input.sigma);
}

LabSettings ExperimentConfig::lab_settings() const {
    LabSettings s;
    s.mc_samples = estimation.mc_samples;
    s.bins = estimation.bins;
    s.seed = estimation.seed;
    s.richardson = estimation.fd_step_rule == "richardson";
    s.quad_rel_tol = estimation.quad_rel_tol;
    return s;
}

std::string ExperimentConfig::render() const {
    std::string out;
    out += "[channel]\n";
    out += "alphas = " + fmt(alphas) + "\n";
    out += "lambda = " + fmt(lambda) + "\n";
    out += "r_min = " + fmt(r.min) + "\n";
    out += "r_max = " + fmt(r.max) + "\n";
    out += "r_count = " + std::to_string(r.count) + "\n";
    out += "r_spacing = " + r.spacing + "\n";
    out += "\n[input]\n";
    out += "kind = " + input.kind + "\n";
    out += "shape = " + fmt(input.shape) + "\n";
    out += "rate = " + fmt(input.rate) + "\n";
    out += "weights = " + fmt(input.weights) + "\n";
    out += "shapes = " + fmt(input.shapes) + "\n";
    out += "rates = " + fmt(input.rates) + "\n";
    out += "mu = " + fmt(input.mu) + "\n";
    out += "sigma = " + fmt(input.sigma) + "\n";
    out += "\n[estimation]\n";
    out += "mc_samples = " + std::to_string(estimation.mc_samples) + "\n";
    out += "bins = " + std::to_string(estimation.bins) + "\n";
    out += "seed = " + std::to_string(estimation.seed) + "\n";
    out += "fd_step_rule = " + estimation.fd_step_rule + "\n";
    out += "quad_rel_tol = " + fmt(estimation.quad_rel_tol) + "\n";
    out += "\n[outputs]\n";
    out += "csv_path = " + outputs.csv_path + "\n";
    out += "json_path = " + outputs.json_path + "\n";
    return out;
}

std::string ExperimentConfig::digest() const {
    // FNV-1a, enough to tag a report with the config that produced it
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : render()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace gammachan
