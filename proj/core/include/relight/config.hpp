#pragma once

#include "relight/agent.hpp"
#include "relight/oracle.hpp"

#include <filesystem>
#include <map>
#include <string>

namespace relight {

using ConfigMap = std::map<std::string, std::string>;

/// Flat key=value text: one pair per line, '#' starts a comment, blank lines
/// ignored, keys and values trimmed of surrounding whitespace.
ConfigMap parse_config_text(const std::string& text);
ConfigMap parse_config_file(const std::filesystem::path& path);

/// Effective settings for one CLI invocation, merged from defaults, an
/// optional config file, and command-line overrides (later wins). Unknown
/// keys are rejected up front.
struct RunConfig {
    TrainConfig train;

    std::string action_space = "ours"; // ours | baseline | custom
    double space_lo = -0.5;
    double space_hi = 1.0;
    double space_step = 1.0 / 18.0; // used only when action_space=custom

    OracleConfig oracle;
    bool oracle_cache = true;

    std::string dataset;
    std::string checkpoint;
    std::string out;

    static RunConfig from_map(const ConfigMap& map);

    /// The fully resolved configuration as sorted key=value pairs; doubles
    /// are printed with enough digits to round-trip exactly, so
    /// from_map(echo()) reproduces this config bit-for-bit.
    ConfigMap echo() const;

    /// Resolves the action space (and keeps train.space in sync).
    ActionSpace resolve_space() const;
};

} // namespace relight
