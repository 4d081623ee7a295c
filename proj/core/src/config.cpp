#include "relight/config.hpp"

#include "relight/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace relight {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument{value};
        return v;
    } catch (const std::exception&) {
        throw ConfigError{"config key '" + key + "': expected a number, got '" + value + "'"};
    }
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument{value};
        return v;
    } catch (const std::exception&) {
        throw ConfigError{"config key '" + key + "': expected an integer, got '" + value + "'"};
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "yes") return true;
    if (value == "0" || value == "false" || value == "no") return false;
    throw ConfigError{"config key '" + key + "': expected a boolean, got '" + value + "'"};
}

std::string fmt_exact(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

ConfigMap parse_config_text(const std::string& text) {
    ConfigMap map;
    std::istringstream in{text};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError{"config line " + std::to_string(lineno) + ": expected key=value"};
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError{"config line " + std::to_string(lineno) + ": empty key"};
        map[key] = value;
    }
    return map;
}

ConfigMap parse_config_file(const std::filesystem::path& path) {
    std::ifstream in{path};
    if (!in) throw IoError{"cannot open config file: " + path.string()};
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

RunConfig RunConfig::from_map(const ConfigMap& map) {
    RunConfig cfg;
    for (const auto& [key, value] : map) {
        if (key == "steps")
            cfg.train.steps = static_cast<int>(parse_int(key, value));
        else if (key == "gamma")
            cfg.train.gamma = parse_double(key, value);
        else if (key == "workers")
            cfg.train.workers = static_cast<int>(parse_int(key, value));
        else if (key == "t_max")
            cfg.train.t_max = static_cast<int>(parse_int(key, value));
        else if (key == "epochs")
            cfg.train.epochs = static_cast<int>(parse_int(key, value));
        else if (key == "batch")
            cfg.train.batch = static_cast<int>(parse_int(key, value));
        else if (key == "learning_rate")
            cfg.train.learning_rate = parse_double(key, value);
        else if (key == "entropy_beta")
            cfg.train.entropy_beta = parse_double(key, value);
        else if (key == "seed")
            cfg.train.seed = static_cast<std::uint64_t>(parse_int(key, value));
        else if (key == "net_channels")
            cfg.train.net_channels = static_cast<int>(parse_int(key, value));
        else if (key == "net_layers")
            cfg.train.net_layers = static_cast<int>(parse_int(key, value));
        else if (key == "w_aes")
            cfg.train.rewards.w_aes = parse_double(key, value);
        else if (key == "w_fea")
            cfg.train.rewards.w_fea = parse_double(key, value);
        else if (key == "w_exp")
            cfg.train.rewards.w_exp = parse_double(key, value);
        else if (key == "lambda")
            cfg.train.rewards.lambda = parse_double(key, value);
        else if (key == "exposure_level")
            cfg.train.rewards.exposure_level = parse_double(key, value);
        else if (key == "exposure_block")
            cfg.train.rewards.exposure_block = static_cast<int>(parse_int(key, value));
        else if (key == "action_space") {
            if (value != "ours" && value != "baseline" && value != "custom")
                throw ConfigError{"action_space must be ours, baseline or custom, got '" + value +
                                  "'"};
            cfg.action_space = value;
        } else if (key == "space_lo")
            cfg.space_lo = parse_double(key, value);
        else if (key == "space_hi")
            cfg.space_hi = parse_double(key, value);
        else if (key == "space_step")
            cfg.space_step = parse_double(key, value);
        else if (key == "oracle") {
            if (value == "proxy")
                cfg.oracle.kind = OracleConfig::Kind::proxy;
            else if (value == "external")
                cfg.oracle.kind = OracleConfig::Kind::external;
            else
                throw ConfigError{"oracle must be proxy or external, got '" + value + "'"};
        } else if (key == "oracle_cmd")
            cfg.oracle.external_cmd = value;
        else if (key == "oracle_timeout_s")
            cfg.oracle.timeout_s = parse_double(key, value);
        else if (key == "oracle_cache")
            cfg.oracle_cache = parse_bool(key, value);
        else if (key == "dataset")
            cfg.dataset = value;
        else if (key == "checkpoint")
            cfg.checkpoint = value;
        else if (key == "out")
            cfg.out = value;
        else
            throw ConfigError{"unknown config key '" + key + "'"};
    }
    if (cfg.oracle.kind == OracleConfig::Kind::external && cfg.oracle.external_cmd.empty())
        throw ConfigError{"oracle=external requires oracle_cmd"};
    cfg.train.space = cfg.resolve_space();
    cfg.train.validate();
    return cfg;
}

ActionSpace RunConfig::resolve_space() const {
    if (action_space == "ours") return ActionSpace::wide();
    if (action_space == "baseline") return ActionSpace::baseline();
    return ActionSpace::make(space_lo, space_hi, space_step);
}

ConfigMap RunConfig::echo() const {
    ConfigMap map;
    map["steps"] = std::to_string(train.steps);
    map["gamma"] = fmt_exact(train.gamma);
    map["workers"] = std::to_string(train.workers);
    map["t_max"] = std::to_string(train.t_max);
    map["epochs"] = std::to_string(train.epochs);
    map["batch"] = std::to_string(train.batch);
    map["learning_rate"] = fmt_exact(train.learning_rate);
    map["entropy_beta"] = fmt_exact(train.entropy_beta);
    map["seed"] = std::to_string(train.seed);
    map["net_channels"] = std::to_string(train.net_channels);
    map["net_layers"] = std::to_string(train.net_layers);
    map["w_aes"] = fmt_exact(train.rewards.w_aes);
    map["w_fea"] = fmt_exact(train.rewards.w_fea);
    map["w_exp"] = fmt_exact(train.rewards.w_exp);
    map["lambda"] = fmt_exact(train.rewards.lambda);
    map["exposure_level"] = fmt_exact(train.rewards.exposure_level);
    map["exposure_block"] = std::to_string(train.rewards.exposure_block);
    map["action_space"] = action_space;
    if (action_space == "custom") {
        map["space_lo"] = fmt_exact(space_lo);
        map["space_hi"] = fmt_exact(space_hi);
        map["space_step"] = fmt_exact(space_step);
    }
    map["oracle"] = oracle.kind == OracleConfig::Kind::proxy ? "proxy" : "external";
    if (!oracle.external_cmd.empty()) map["oracle_cmd"] = oracle.external_cmd;
    if (oracle.kind == OracleConfig::Kind::external)
        map["oracle_timeout_s"] = fmt_exact(oracle.timeout_s);
    map["oracle_cache"] = oracle_cache ? "1" : "0";
    if (!dataset.empty()) map["dataset"] = dataset;
    if (!checkpoint.empty()) map["checkpoint"] = checkpoint;
    if (!out.empty()) map["out"] = out;
    return map;
}

} // namespace relight
