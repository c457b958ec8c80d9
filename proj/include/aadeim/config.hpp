#pragma once

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aadeim/driver.hpp"
#include "aadeim/errors.hpp"
#include "aadeim/models/advection.hpp"
#include "aadeim/models/burgers.hpp"

namespace aadeim {

// Flat "key = value" config with [section] headers. Lines starting with '#'
// are comments. Keys are addressed as "section.key". Unknown keys and
// duplicate keys are rejected; the grammar is spelled out in the README.
struct ConfigFile {
    std::map<std::string, std::string> values; // "section.key" -> raw value
    std::map<std::string, int> lines;          // for diagnostics

    void set(const std::string& key, const std::string& value, int line = 0) {
        values[key] = value;
        lines[key] = line;
    }
};

namespace detail {

inline std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!(std::islower(static_cast<unsigned char>(c)) ||
              std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return true;
}

} // namespace detail

inline ConfigFile parse_config_text(const std::string& text) {
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = detail::strip(line);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw config_error("unterminated section header", lineno,
                                   static_cast<int>(s.size()));
            section = detail::strip(s.substr(1, s.size() - 2));
            if (!detail::valid_key(section))
                throw config_error("invalid section name '" + section + "'", lineno, 1);
            continue;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw config_error("expected 'key = value'", lineno, 1);
        const std::string key = detail::strip(s.substr(0, eq));
        const std::string value = detail::strip(s.substr(eq + 1));
        if (!detail::valid_key(key))
            throw config_error("invalid key '" + key + "'", lineno, 1);
        if (section.empty())
            throw config_error("key '" + key + "' outside any [section]", lineno, 1);
        if (value.empty())
            throw config_error("empty value for key '" + key + "'", lineno,
                               static_cast<int>(eq + 2));
        const std::string full = section + "." + key;
        if (cfg.values.count(full))
            throw config_error("duplicate key '" + full + "'", lineno, 1);
        cfg.set(full, value, lineno);
    }
    return cfg;
}

inline ConfigFile parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open config file " + path, 0, 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

// FNV-1a 64 over the canonical "key=value" lines (std::map keeps them sorted),
// so the hash pins the effective configuration including overrides.
inline std::uint64_t config_hash(const ConfigFile& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto mix = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& [k, v] : cfg.values) {
        mix(k);
        mix("=");
        mix(v);
        mix("\n");
    }
    return h;
}

// Typed reader that consumes keys so leftovers can be reported as unknown.
class ConfigReader {
public:
    explicit ConfigReader(ConfigFile cfg) : cfg_(std::move(cfg)) {}

    bool has(const std::string& key) const { return cfg_.values.count(key) > 0; }

    std::string take_string(const std::string& key) {
        auto it = cfg_.values.find(key);
        if (it == cfg_.values.end())
            throw config_error("missing required key '" + key + "'", 0, 0);
        std::string v = it->second;
        consume(key);
        return v;
    }

    std::string take_string(const std::string& key, const std::string& fallback) {
        return has(key) ? take_string(key) : fallback;
    }

    double take_double(const std::string& key) { return parse_double(key, take_string(key)); }
    double take_double(const std::string& key, double fallback) {
        return has(key) ? take_double(key) : fallback;
    }

    long take_long(const std::string& key) { return parse_long(key, take_string(key)); }
    long take_long(const std::string& key, long fallback) {
        return has(key) ? take_long(key) : fallback;
    }

    bool take_bool(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const std::string v = take_string(key);
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        throw config_error("key '" + key + "': expected true/false, got '" + v + "'",
                           line_of(key), 1);
    }

    std::vector<double> take_double_list(const std::string& key) {
        const std::string raw = take_string(key);
        std::vector<double> out;
        std::stringstream ss(raw);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(parse_double(key, detail::strip(cell)));
        if (out.empty())
            throw config_error("key '" + key + "': empty list", line_of(key), 1);
        return out;
    }

    std::vector<long> take_long_list(const std::string& key) {
        const std::string raw = take_string(key);
        std::vector<long> out;
        std::stringstream ss(raw);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(parse_long(key, detail::strip(cell)));
        return out;
    }

    void reject_unknown() const {
        for (const auto& [k, v] : cfg_.values)
            throw config_error("unknown key '" + k + "'", line_of(k), 1);
    }

    int line_of(const std::string& key) const {
        auto it = cfg_.lines.find(key);
        return it == cfg_.lines.end() ? 0 : it->second;
    }

private:
    void consume(const std::string& key) {
        cfg_.values.erase(key);
    }

    double parse_double(const std::string& key, const std::string& v) const {
        char* end = nullptr;
        const double x = std::strtod(v.c_str(), &end);
        if (end == v.c_str() || *end != '\0')
            throw config_error("key '" + key + "': cannot parse number '" + v + "'",
                               line_of(key), 1);
        return x;
    }

    long parse_long(const std::string& key, const std::string& v) const {
        long x = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc{} || p != v.data() + v.size())
            throw config_error("key '" + key + "': cannot parse integer '" + v + "'",
                               line_of(key), 1);
        return x;
    }

    ConfigFile cfg_;
};

// Everything a `run` needs: the model, the method, output and seed choices.
struct ExperimentConfig {
    std::string model_kind;   // advection | burgers
    int model_n = 0;
    double model_dt = 0.0;
    double model_mu = 0.0;
    long model_steps = 0;

    std::string method_kind;  // full | static | aadeim | fullsvd
    AadeimConfig aadeim;      // shared knobs for aadeim/fullsvd; newton for all
    long svd_adapt_every = 1;
    std::vector<double> training_mu; // static method: training parameters
    int static_n = 0;

    bool write_binary = false;
    std::uint64_t hash = 0;
};

inline std::unique_ptr<FullModel> make_model(const ExperimentConfig& c) {
    if (c.model_kind == "advection")
        return std::make_unique<AdvectionModel>(c.model_n, c.model_mu, c.model_dt,
                                                 c.model_steps);
    if (c.model_kind == "burgers")
        return std::make_unique<BurgersModel>(c.model_n, c.model_mu, c.model_dt, c.model_steps);
    throw config_error("unknown model kind '" + c.model_kind + "'", 0, 0);
}

// Parses and validates; every referenced key is checked before any compute,
// and unconsumed keys are rejected. The AADEIM_SEED environment variable, if
// set, overrides the configured seed (and is folded into the hash).
inline ExperimentConfig parse_experiment_config(ConfigFile raw) {
    if (const char* env = std::getenv("AADEIM_SEED")) {
        raw.set("method.seed", env, 0);
    }
    ExperimentConfig out;
    out.hash = config_hash(raw);
    ConfigReader r(std::move(raw));

    out.model_kind = r.take_string("model.kind");
    if (out.model_kind != "advection" && out.model_kind != "burgers")
        throw config_error("model.kind must be advection or burgers, got '" + out.model_kind +
                               "'",
                           r.line_of("model.kind"), 1);
    out.model_n = static_cast<int>(r.take_long("model.n"));
    out.model_dt = r.take_double("model.dt");
    out.model_mu = r.take_double("model.mu");
    if (out.model_n < 8) throw config_error("model.n too small", r.line_of("model.n"), 1);
    if (!(out.model_dt > 0.0))
        throw config_error("model.dt must be positive", r.line_of("model.dt"), 1);
    if (r.has("model.steps") && r.has("model.t_end"))
        throw config_error("give model.steps or model.t_end, not both",
                           r.line_of("model.steps"), 1);
    if (r.has("model.steps"))
        out.model_steps = r.take_long("model.steps");
    else if (r.has("model.t_end"))
        out.model_steps = std::lround(r.take_double("model.t_end") / out.model_dt);
    else
        throw config_error("missing model.steps or model.t_end", 0, 0);
    if (out.model_steps < 1)
        throw config_error("model horizon must cover at least one step", 0, 0);

    out.method_kind = r.take_string("method.kind", "full");
    AadeimConfig& a = out.aadeim;
    a.n = static_cast<int>(r.take_long("method.n", a.n));
    a.w = static_cast<int>(r.take_long("method.w", a.n + 1));
    a.w_init = r.take_long("method.w_init", a.w_init);
    a.m = static_cast<int>(r.take_long("method.m", a.m));
    a.z = r.take_long("method.z", a.z);
    a.rank = static_cast<int>(r.take_long("method.rank", a.rank));
    a.adapt_every = r.take_long("method.adapt_every", a.adapt_every);
    a.warm_start_stride = r.take_long("method.warm_start_stride", a.warm_start_stride);
    const std::string samp = r.take_string("method.sampling", "adaptive");
    if (samp == "adaptive")
        a.sampling = SamplingMode::adaptive;
    else if (samp == "uniform")
        a.sampling = SamplingMode::uniform;
    else
        throw config_error("method.sampling must be adaptive or uniform",
                           r.line_of("method.sampling"), 1);
    a.newton.iterations = static_cast<int>(r.take_long("method.newton_iterations", 15));
    a.newton.step_size = r.take_double("method.newton_step_size", 1.0);
    a.seed = static_cast<std::uint64_t>(r.take_long("method.seed", 0));
    out.svd_adapt_every = r.take_long("method.svd_adapt_every", 1);
    if (r.has("method.training_mu")) out.training_mu = r.take_double_list("method.training_mu");
    out.static_n = static_cast<int>(r.take_long("method.static_n", a.n));

    if (out.method_kind == "static" && out.training_mu.empty())
        throw config_error("static method needs method.training_mu", 0, 0);
    if (out.method_kind != "full" && out.method_kind != "static" &&
        out.method_kind != "aadeim" && out.method_kind != "fullsvd")
        throw config_error("unknown method.kind '" + out.method_kind + "'",
                           r.line_of("method.kind"), 1);

    a.storage.dense_until = r.take_long("output.store_dense_until", -1);
    a.storage.every = r.take_long("output.store_every", 1);
    out.write_binary = r.take_bool("output.binary", false);

    r.reject_unknown();

    if (out.method_kind == "aadeim" || out.method_kind == "fullsvd")
        a.validate(out.model_steps);
    return out;
}

} // namespace aadeim
