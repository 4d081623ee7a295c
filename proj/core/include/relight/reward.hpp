#pragma once

#include "relight/curve.hpp"
#include "relight/image.hpp"
#include "relight/oracle.hpp"

#include <span>

namespace relight {

struct RewardWeights {
    double w_aes = 1.0; // aesthetic-score delta
    double w_fea = 0.1; // feature preservation penalty
    double w_exp = 1.0; // exposure penalty
    double lambda = 100.0;       // smoothness weight inside the feature term
    double exposure_level = 0.6; // well-exposedness target E
    int exposure_block = 16;     // block size for the exposure penalty
};

struct RewardBreakdown {
    double aes = 0.0;
    double fea = 0.0;
    double exp = 0.0;
    double total = 0.0;
    // diagnostics
    double color_term = 0.0;
    double smooth_term = 0.0;
};

/// Expected-score delta between consecutive states: E[score(next)] - E[score(cur)].
double aesthetic_reward(Oracle& oracle, const ImageTensor& next, const ImageTensor& cur);

/// Color-constancy plus coefficient smoothness penalty.
/// Color term: sum over the three unordered channel pairs of the squared
/// difference of channel means of `next`. Smoothness term: lambda * (1/n) *
/// sum over the given maps of 3 * (mean |horizontal forward difference| +
/// mean |vertical forward difference|) of the coefficient map; boundary
/// differences are omitted and the factor 3 accounts for the shared
/// coefficient acting on all three channels.
struct FeatureTerms {
    double color;
    double smooth;
};
FeatureTerms feature_terms(const ImageTensor& next, std::span<const ActionMap> maps, double lambda,
                           int n_steps);
double feature_reward(const ImageTensor& next, std::span<const ActionMap> maps, double lambda,
                      int n_steps);

/// Mean over non-overlapping block x block tiles (partial edge tiles
/// included, each averaged over its own pixels) of |Y_b - level|, where Y_b
/// is the tile's mean luminance.
double exposure_reward(const ImageTensor& next, double level, int block);

/// total = w_aes * aes - w_fea * fea - w_exp * exp.
RewardBreakdown combined_reward(const RewardWeights& w, double r_aes, double r_fea, double r_exp);

/// All three terms for one transition, using maps[0..step] as the
/// smoothness prefix.
RewardBreakdown step_reward(Oracle& oracle, const RewardWeights& w, const ImageTensor& next,
                            const ImageTensor& cur, std::span<const ActionMap> maps_so_far);

} // namespace relight
