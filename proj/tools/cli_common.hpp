#pragma once

#include "relight/config.hpp"
#include "relight/errors.hpp"

#include <optional>
#include <string>
#include <vector>

namespace relight::cli {

struct Args {
    std::optional<std::string> config;
    std::optional<std::string> dataset;
    std::optional<std::string> checkpoint;
    std::optional<std::string> out;
    std::optional<std::string> action_space;
    std::optional<long> steps;
    std::optional<long> seed;
    std::optional<long> workers;
    std::optional<long> epochs;
    bool no_aes_reward = false;
    bool help = false;
    std::vector<std::string> positional;
};

/// Parses everything after the subcommand. Throws ConfigError on unknown or
/// malformed flags.
Args parse_args(int argc, char** argv);

/// Defaults, then `base` (e.g. a checkpoint's config echo), then the
/// --config file, then individual flags; later layers win.
RunConfig merge_config(const ConfigMap& base, const Args& args);

void print_usage(std::ostream& os);

int cmd_train(const Args& args);
int cmd_enhance(const Args& args);
int cmd_coverage(const Args& args);
int cmd_report(const Args& args);
int cmd_score(const Args& args);

} // namespace relight::cli
