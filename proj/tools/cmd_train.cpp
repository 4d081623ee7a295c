#include "cli_common.hpp"

#include "relight/checkpoint.hpp"
#include "relight/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace relight::cli {

namespace fs = std::filesystem;

int cmd_train(const Args& args) {
    RunConfig cfg = merge_config({}, args);
    if (cfg.dataset.empty()) throw ConfigError{"train: --dataset is required"};
    if (!fs::is_directory(cfg.dataset))
        throw ConfigError{"train: dataset directory not found: " + cfg.dataset};
    const fs::path out_dir = cfg.out.empty() ? fs::path{"."} : fs::path{cfg.out};

    const Dataset ds = scan_dataset(cfg.dataset);
    const std::vector<ImageTensor> images = load_images(ds.low);
    std::unique_ptr<Oracle> oracle = make_oracle(cfg.oracle);
    if (cfg.oracle_cache) oracle = std::make_unique<CachingOracle>(std::move(oracle));

    fs::create_directories(out_dir);
    const fs::path log_path = out_dir / "train_log.csv";
    const fs::path ckpt_path =
        cfg.checkpoint.empty() ? (out_dir / "model.ckpt") : fs::path{cfg.checkpoint};
    std::ofstream log{log_path, std::ios::trunc};
    if (!log) throw IoError{"cannot open training log for writing: " + log_path.string()};

    const ConfigMap echo = cfg.echo();
    for (const auto& [k, v] : echo) log << "# " << k << '=' << v << '\n';
    log << "# action_count=" << cfg.train.space.count() << '\n';
    log << "# arch=" << cfg.train.net_spec().descriptor() << '\n';
    log << "# images=" << images.size() << '\n';

    const TrainResult result =
        train(cfg.train, images, *oracle, [&log](const std::string& line) { log << line << '\n'; });
    log.flush();
    if (!log) throw IoError{"short write to training log: " + log_path.string()};

    nn::NetworkParams params = result.params;
    write_checkpoint(ckpt_path, nn::to_checkpoint(params, echo));

    std::cout << "trained " << result.episodes << " episodes (" << result.updates
              << " updates) on " << images.size() << " images\n"
              << "checkpoint: " << ckpt_path.string() << '\n'
              << "log:        " << log_path.string() << '\n';
    return 0;
}

} // namespace relight::cli
