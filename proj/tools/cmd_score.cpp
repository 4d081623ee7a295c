#include "cli_common.hpp"

#include "relight/image.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace relight::cli {

namespace fs = std::filesystem;

int cmd_score(const Args& args) {
    if (args.positional.size() != 1)
        throw ConfigError{"score: expected exactly one image path, e.g. `relight score img.png`"};
    const fs::path path{args.positional.front()};
    if (!fs::exists(path)) throw ConfigError{"score: image not found: " + path.string()};

    const RunConfig cfg = merge_config({}, args);
    const ImageTensor img = load_image(path);
    std::unique_ptr<Oracle> oracle = make_oracle(cfg.oracle);

    const RatingDistribution dist = oracle->score(img);
    std::printf("image: %s (%dx%d)\n", path.string().c_str(), img.width, img.height);
    for (int k = 0; k < 10; ++k)
        std::printf("P[%2d] = %.6f\n", k + 1, dist.probs[static_cast<std::size_t>(k)]);
    std::printf("expected score = %.6f\n", expected_score(dist));

    if (cfg.oracle.kind == OracleConfig::Kind::proxy) {
        const ProxyOracle proxy{cfg.oracle.proxy};
        const ProxyOracle::Components c = proxy.components(img);
        std::printf("proxy components: luminance=%.6f std=%.6f saturation=%.6f clip=%.6f "
                    "quality=%.6f rating_mean=%.6f\n",
                    c.mean_luminance, c.luminance_std, c.mean_saturation, c.clip_fraction,
                    c.quality, c.rating_mean);
    }
    return 0;
}

} // namespace relight::cli
