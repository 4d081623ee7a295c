#include "cli_common.hpp"

#include "relight/checkpoint.hpp"
#include "relight/dataset.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace relight::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace

int cmd_enhance(const Args& args) {
    if (!args.checkpoint) throw ConfigError{"enhance: --checkpoint is required"};
    if (!fs::exists(*args.checkpoint))
        throw ConfigError{"enhance: checkpoint not found: " + *args.checkpoint};

    const nn::CheckpointData data = nn::read_checkpoint(*args.checkpoint);
    ConfigMap base{data.config.begin(), data.config.end()};
    const RunConfig cfg = merge_config(base, args);
    if (cfg.dataset.empty()) throw ConfigError{"enhance: --dataset is required"};
    if (!fs::is_directory(cfg.dataset))
        throw ConfigError{"enhance: dataset directory not found: " + cfg.dataset};

    const nn::NetworkParams params = nn::params_from_checkpoint(data);
    const ActionSpace space = cfg.resolve_space();
    if (space.count() != params.spec.action_count)
        throw ConfigError{"enhance: action space (" + std::to_string(space.count()) +
                          " actions) does not match the checkpoint policy head (" +
                          std::to_string(params.spec.action_count) + ")"};
    const int steps = cfg.train.steps;

    const Dataset ds = scan_dataset(cfg.dataset);
    std::unique_ptr<Oracle> oracle = make_oracle(cfg.oracle);
    if (cfg.oracle_cache) oracle = std::make_unique<CachingOracle>(std::move(oracle));

    const fs::path out_dir = cfg.out.empty() ? fs::path{"enhanced"} : fs::path{cfg.out};
    fs::create_directories(out_dir);
    std::ofstream summary{out_dir / "enhance_summary.csv", std::ios::trunc};
    if (!summary) throw IoError{"cannot write summary under " + out_dir.string()};
    summary << "image,step,luminance_in,luminance_out,r_aes,r_fea,r_exp,r_total\n";

    for (const fs::path& path : ds.low) {
        const ImageTensor input = load_image(path);
        const EnhanceResult res = enhance(params, input, steps, space);
        const std::string stem = path.stem().string();

        const ImageTensor* prev = &input;
        for (int k = 1; k <= steps; ++k) {
            const ImageTensor& state = res.states[static_cast<std::size_t>(k - 1)];
            save_image(state, out_dir / (stem + "_t" + std::to_string(k) + ".png"));
            const std::span<const ActionMap> prefix{res.maps.data(), static_cast<std::size_t>(k)};
            const RewardBreakdown rb =
                step_reward(*oracle, cfg.train.rewards, state, *prev, prefix);
            summary << path.filename().string() << ',' << k << ',' << fmt(mean_luminance(*prev))
                    << ',' << fmt(mean_luminance(state)) << ',' << fmt(rb.aes) << ','
                    << fmt(rb.fea) << ',' << fmt(rb.exp) << ',' << fmt(rb.total) << '\n';
            prev = &state;
        }
        std::cout << path.filename().string() << ": luminance " << fmt(mean_luminance(input))
                  << " -> " << fmt(mean_luminance(res.states.back())) << " in " << steps
                  << " steps\n";
    }
    std::cout << "outputs in " << out_dir.string() << '\n';
    return 0;
}

} // namespace relight::cli
