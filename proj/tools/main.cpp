#include "cli_common.hpp"

#include <getopt.h>

#include <cstring>
#include <iostream>

namespace relight::cli {

void print_usage(std::ostream& os) {
    os << "usage: relight <command> [flags]\n"
          "\n"
          "commands:\n"
          "  train      train a policy/value network on a dataset\n"
          "  enhance    run greedy multi-step enhancement with a checkpoint\n"
          "  coverage   print the adjustment-coverage table of the action spaces\n"
          "  report     metrics summary (PSNR/SSIM/luminance/timing) for a checkpoint\n"
          "  score      print the aesthetic rating distribution of one image\n"
          "\n"
          "flags:\n"
          "  --config <path>            key=value config file\n"
          "  --dataset <dir>            dataset root (<dir>/low/*.png, optional <dir>/high)\n"
          "  --checkpoint <path>        model checkpoint to load (or write, for train)\n"
          "  --steps <n>                enhancement steps per episode\n"
          "  --seed <n>                 RNG seed\n"
          "  --workers <n>              actor-learner thread count\n"
          "  --epochs <n>               training epochs (full passes over the dataset)\n"
          "  --action-space <name>      ours | baseline\n"
          "  --no-aes-reward            ablation: drop the aesthetic reward term (w_aes=0)\n"
          "  --out <dir>                output directory\n"
          "  -h, --help                 show this help\n"
          "\n"
          "exit codes: 0 success, 1 usage/config error, 2 runtime failure\n";
}

Args parse_args(int argc, char** argv) {
    static const struct option longopts[] = {
        {"config", required_argument, nullptr, 'c'},
        {"dataset", required_argument, nullptr, 'd'},
        {"checkpoint", required_argument, nullptr, 'k'},
        {"steps", required_argument, nullptr, 's'},
        {"seed", required_argument, nullptr, 'S'},
        {"workers", required_argument, nullptr, 'w'},
        {"epochs", required_argument, nullptr, 'e'},
        {"action-space", required_argument, nullptr, 'a'},
        {"no-aes-reward", no_argument, nullptr, 'n'},
        {"out", required_argument, nullptr, 'o'},
        {"help", no_argument, nullptr, 'h'},
        {nullptr, 0, nullptr, 0},
    };

    Args args;
    optind = 1;
    opterr = 0; // report errors ourselves
    int opt = 0;
    auto as_long = [](const char* flag, const char* text) {
        try {
            std::size_t used = 0;
            const long v = std::stol(text, &used);
            if (used != std::strlen(text)) throw std::invalid_argument{text};
            return v;
        } catch (const std::exception&) {
            throw ConfigError{std::string{"flag "} + flag + ": expected an integer, got '" + text +
                              "'"};
        }
    };
    while ((opt = getopt_long(argc, argv, "h", longopts, nullptr)) != -1) {
        switch (opt) {
        case 'c': args.config = optarg; break;
        case 'd': args.dataset = optarg; break;
        case 'k': args.checkpoint = optarg; break;
        case 's': args.steps = as_long("--steps", optarg); break;
        case 'S': args.seed = as_long("--seed", optarg); break;
        case 'w': args.workers = as_long("--workers", optarg); break;
        case 'e': args.epochs = as_long("--epochs", optarg); break;
        case 'a': args.action_space = optarg; break;
        case 'n': args.no_aes_reward = true; break;
        case 'o': args.out = optarg; break;
        case 'h': args.help = true; break;
        default:
            throw ConfigError{std::string{"unknown or malformed flag near '"} +
                              (optind > 1 && optind <= argc ? argv[optind - 1] : "?") + "'"};
        }
    }
    for (int i = optind; i < argc; ++i) args.positional.emplace_back(argv[i]);
    return args;
}

RunConfig merge_config(const ConfigMap& base, const Args& args) {
    ConfigMap map = base;
    if (args.config) {
        const ConfigMap file = parse_config_file(*args.config);
        for (const auto& [k, v] : file) map[k] = v;
    }
    if (args.dataset) map["dataset"] = *args.dataset;
    if (args.checkpoint) map["checkpoint"] = *args.checkpoint;
    if (args.out) map["out"] = *args.out;
    if (args.steps) map["steps"] = std::to_string(*args.steps);
    if (args.seed) map["seed"] = std::to_string(*args.seed);
    if (args.workers) map["workers"] = std::to_string(*args.workers);
    if (args.epochs) map["epochs"] = std::to_string(*args.epochs);
    if (args.action_space) map["action_space"] = *args.action_space;
    if (args.no_aes_reward) map["w_aes"] = "0";
    return RunConfig::from_map(map);
}

} // namespace relight::cli

int main(int argc, char** argv) {
    using namespace relight;
    if (argc < 2) {
        cli::print_usage(std::cerr);
        return 1;
    }
    const std::string command = argv[1];
    if (command == "-h" || command == "--help" || command == "help") {
        cli::print_usage(std::cout);
        return 0;
    }

    int (*handler)(const cli::Args&) = nullptr;
    if (command == "train")
        handler = cli::cmd_train;
    else if (command == "enhance")
        handler = cli::cmd_enhance;
    else if (command == "coverage")
        handler = cli::cmd_coverage;
    else if (command == "report")
        handler = cli::cmd_report;
    else if (command == "score")
        handler = cli::cmd_score;
    else {
        std::cerr << "error: unknown command '" << command << "'\n\n";
        cli::print_usage(std::cerr);
        return 1;
    }

    try {
        const cli::Args args = cli::parse_args(argc - 1, argv + 1);
        if (args.help) {
            cli::print_usage(std::cout);
            return 0;
        }
        return handler(args);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
