#include "relight/reward.hpp"

#include "relight/errors.hpp"

#include <algorithm>
#include <cmath>

namespace relight {

double aesthetic_reward(Oracle& oracle, const ImageTensor& next, const ImageTensor& cur) {
    return expected_score(oracle.score(next)) - expected_score(oracle.score(cur));
}

namespace {

double channel_mean(const ImageTensor& img, int c) {
    double acc = 0.0;
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i) acc += img.data[i * 3 + static_cast<std::size_t>(c)];
    return n ? acc / static_cast<double>(n) : 0.0;
}

// Mean absolute forward difference of the coefficient map along each axis,
// interior differences only.
double map_roughness(const ActionMap& m) {
    const int h = m.height;
    const int w = m.width;
    double acc_x = 0.0;
    std::size_t cnt_x = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x + 1 < w; ++x) {
            acc_x += std::abs(m.coeff_at(y, x + 1) - m.coeff_at(y, x));
            ++cnt_x;
        }
    double acc_y = 0.0;
    std::size_t cnt_y = 0;
    for (int y = 0; y + 1 < h; ++y)
        for (int x = 0; x < w; ++x) {
            acc_y += std::abs(m.coeff_at(y + 1, x) - m.coeff_at(y, x));
            ++cnt_y;
        }
    const double mx = cnt_x ? acc_x / static_cast<double>(cnt_x) : 0.0;
    const double my = cnt_y ? acc_y / static_cast<double>(cnt_y) : 0.0;
    return 3.0 * (mx + my);
}

} // namespace

FeatureTerms feature_terms(const ImageTensor& next, std::span<const ActionMap> maps, double lambda,
                           int n_steps) {
    if (n_steps <= 0) throw ShapeError{"feature_terms: n_steps must be positive"};
    const double mr = channel_mean(next, 0);
    const double mg = channel_mean(next, 1);
    const double mb = channel_mean(next, 2);
    const double color = (mr - mg) * (mr - mg) + (mr - mb) * (mr - mb) + (mg - mb) * (mg - mb);
    double rough = 0.0;
    for (const ActionMap& m : maps) rough += map_roughness(m);
    const double smooth = lambda * rough / static_cast<double>(n_steps);
    return {color, smooth};
}

double feature_reward(const ImageTensor& next, std::span<const ActionMap> maps, double lambda,
                      int n_steps) {
    const FeatureTerms t = feature_terms(next, maps, lambda, n_steps);
    return t.color + t.smooth;
}

double exposure_reward(const ImageTensor& next, double level, int block) {
    if (block <= 0) throw ShapeError{"exposure_reward: block size must be positive"};
    const int h = next.height;
    const int w = next.width;
    double acc = 0.0;
    std::size_t blocks = 0;
    for (int by = 0; by < h; by += block)
        for (int bx = 0; bx < w; bx += block) {
            const int y1 = std::min(by + block, h);
            const int x1 = std::min(bx + block, w);
            double lum = 0.0;
            for (int y = by; y < y1; ++y)
                for (int x = bx; x < x1; ++x)
                    lum += (next.at(y, x, 0) + next.at(y, x, 1) + next.at(y, x, 2)) / 3.0;
            const double npix = static_cast<double>((y1 - by) * (x1 - bx));
            acc += std::abs(lum / npix - level);
            ++blocks;
        }
    return blocks ? acc / static_cast<double>(blocks) : 0.0;
}

RewardBreakdown combined_reward(const RewardWeights& w, double r_aes, double r_fea, double r_exp) {
    RewardBreakdown b;
    b.aes = r_aes;
    b.fea = r_fea;
    b.exp = r_exp;
    b.total = w.w_aes * r_aes - w.w_fea * r_fea - w.w_exp * r_exp;
    return b;
}

RewardBreakdown step_reward(Oracle& oracle, const RewardWeights& w, const ImageTensor& next,
                            const ImageTensor& cur, std::span<const ActionMap> maps_so_far) {
    const double r_aes = aesthetic_reward(oracle, next, cur);
    const FeatureTerms ft =
        feature_terms(next, maps_so_far, w.lambda, static_cast<int>(maps_so_far.size()));
    const double r_fea = ft.color + ft.smooth;
    const double r_exp = exposure_reward(next, w.exposure_level, w.exposure_block);
    RewardBreakdown b = combined_reward(w, r_aes, r_fea, r_exp);
    b.color_term = ft.color;
    b.smooth_term = ft.smooth;
    return b;
}

} // namespace relight
