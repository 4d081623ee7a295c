#include "cli_common.hpp"

#include "relight/checkpoint.hpp"
#include "relight/dataset.hpp"
#include "relight/metrics.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

namespace relight::cli {

namespace fs = std::filesystem;

namespace {

std::string cell(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

struct Column {
    double sum = 0.0;
    std::size_t n = 0;
    bool saw_inf = false;

    void add(double v) {
        if (std::isinf(v)) {
            saw_inf = true;
            return;
        }
        sum += v;
        ++n;
    }
    std::string mean() const {
        if (n == 0) return saw_inf ? "inf" : "na";
        return cell(sum / static_cast<double>(n));
    }
};

} // namespace

int cmd_report(const Args& args) {
    if (!args.checkpoint) throw ConfigError{"report: --checkpoint is required"};
    if (!fs::exists(*args.checkpoint))
        throw ConfigError{"report: checkpoint not found: " + *args.checkpoint};

    const nn::CheckpointData data = nn::read_checkpoint(*args.checkpoint);
    ConfigMap base{data.config.begin(), data.config.end()};
    const RunConfig cfg = merge_config(base, args);
    if (cfg.dataset.empty()) throw ConfigError{"report: --dataset is required"};
    if (!fs::is_directory(cfg.dataset))
        throw ConfigError{"report: dataset directory not found: " + cfg.dataset};

    const nn::NetworkParams params = nn::params_from_checkpoint(data);
    const ActionSpace space = cfg.resolve_space();
    if (space.count() != params.spec.action_count)
        throw ConfigError{"report: action space does not match the checkpoint policy head"};
    const int steps = cfg.train.steps;

    const Dataset ds = scan_dataset(cfg.dataset);
    std::unique_ptr<Oracle> oracle = make_oracle(cfg.oracle);
    if (cfg.oracle_cache) oracle = std::make_unique<CachingOracle>(std::move(oracle));

    const fs::path out_dir = cfg.out.empty() ? fs::path{"."} : fs::path{cfg.out};
    fs::create_directories(out_dir);
    const fs::path report_path = out_dir / "report.csv";
    std::ofstream rep{report_path, std::ios::trunc};
    if (!rep) throw IoError{"cannot write " + report_path.string()};
    rep << "image,psnr,ssim,luminance_in,luminance_out,step_ms,r_aes,r_fea,r_exp,r_total\n";

    Column c_psnr, c_ssim, c_lin, c_lout, c_ms, c_aes, c_fea, c_exp, c_tot;
    for (const fs::path& path : ds.low) {
        const ImageTensor input = load_image(path);

        const auto t0 = std::chrono::steady_clock::now();
        const EnhanceResult res = enhance(params, input, steps, space);
        const double step_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count() /
            steps;

        const ImageTensor& final_state = res.states.back();
        const ImageTensor& before_final =
            steps > 1 ? res.states[static_cast<std::size_t>(steps - 2)] : input;
        const RewardBreakdown rb =
            step_reward(*oracle, cfg.train.rewards, final_state, before_final, res.maps);

        std::string psnr_cell = "na";
        std::string ssim_cell = "na";
        if (const auto ref_path = ds.reference_for(path)) {
            const ImageTensor ref = load_image(*ref_path);
            if (!ref.same_shape(final_state))
                throw FormatError{"reference " + ref_path->string() +
                                  " does not match the enhanced image dimensions"};
            const double p = psnr(final_state, ref);
            const double s = ssim(final_state, ref);
            psnr_cell = cell(p);
            ssim_cell = cell(s);
            c_psnr.add(p);
            c_ssim.add(s);
        }
        const double lin = mean_luminance(input);
        const double lout = mean_luminance(final_state);
        c_lin.add(lin);
        c_lout.add(lout);
        c_ms.add(step_ms);
        c_aes.add(rb.aes);
        c_fea.add(rb.fea);
        c_exp.add(rb.exp);
        c_tot.add(rb.total);

        rep << path.filename().string() << ',' << psnr_cell << ',' << ssim_cell << ','
            << cell(lin) << ',' << cell(lout) << ',' << cell(step_ms) << ',' << cell(rb.aes)
            << ',' << cell(rb.fea) << ',' << cell(rb.exp) << ',' << cell(rb.total) << '\n';
    }
    rep << "mean," << c_psnr.mean() << ',' << c_ssim.mean() << ',' << c_lin.mean() << ','
        << c_lout.mean() << ',' << c_ms.mean() << ',' << c_aes.mean() << ',' << c_fea.mean() << ','
        << c_exp.mean() << ',' << c_tot.mean() << '\n';
    rep.flush();
    if (!rep) throw IoError{"short write to " + report_path.string()};

    std::cout << "report: " << report_path.string() << '\n';
    return 0;
}

} // namespace relight::cli
