#pragma once

#include "relight/adam.hpp"
#include "relight/curve.hpp"
#include "relight/image.hpp"
#include "relight/net.hpp"
#include "relight/oracle.hpp"
#include "relight/reward.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace relight {

enum class SampleMode { sample, greedy };

/// Everything one n-step enhancement episode produced, stored numerically so
/// the loss can be rebuilt (and finite-difference checked) against any
/// parameter values.
struct RolloutTrace {
    std::vector<ImageTensor> states;             // n+1
    std::vector<ActionMap> action_maps;          // n
    std::vector<std::vector<double>> log_probs;  // n row-major HxW maps of chosen-action log pi
    std::vector<std::vector<double>> value_maps; // n+1 row-major HxW maps, last is the bootstrap
    std::vector<double> entropies;               // n mean per-pixel policy entropies
    std::vector<RewardBreakdown> rewards;        // n
    double gamma = 0.95;

    int steps() const { return static_cast<int>(action_maps.size()); }
    void validate() const;
};

struct TrainConfig {
    int steps = 6;
    double gamma = 0.95;
    int workers = 4;
    int t_max = 0; // 0 means one update per episode (t_max = steps)
    int epochs = 1;
    int batch = 2; // episodes per parameter update
    double learning_rate = 1e-4;
    double entropy_beta = 0.01;
    std::uint64_t seed = 0;
    int net_channels = 32;
    int net_layers = 4;
    ActionSpace space = ActionSpace::wide();
    RewardWeights rewards;

    nn::NetSpec net_spec() const;
    void validate() const;
};

/// Per-pixel action selection from an action_count x H x W probability
/// tensor (row-major planes). Sampling is counter-based on
/// (seed, pixel index), so a map is a pure function of the seed and the
/// probabilities; greedy takes the argmax with ties to the lower index.
ActionMap sample_actions(std::span<const double> probs, const ActionSpace& space, int height,
                         int width, SampleMode mode, std::uint64_t seed);

/// Reward-to-go with discount gamma and terminal bootstrap:
/// sum_{i=0}^{n-t-1} gamma^i r[t+i] + gamma^(n-t) * bootstrap.
double discounted_return(std::span<const double> rewards, double bootstrap, double gamma, int t,
                         int n);

/// All returns at once by the backward recursion R <- r + gamma * R seeded
/// with the bootstrap value.
std::vector<double> returns_backward(std::span<const double> rewards, double bootstrap,
                                     double gamma);

inline double advantage(double ret, double value) { return ret - value; }

/// The per-update objective rebuilt from a frozen trace: mean over steps and
/// pixels of -log pi(a) * G with G = R - V frozen from the trace, plus half
/// the squared value error against the frozen returns, minus beta times the
/// mean policy entropy. Returns the scalar graph root plus the numeric
/// components.
struct TraceLoss {
    nn::NodePtr total;
    double policy = 0.0;
    double value = 0.0;
    double entropy = 0.0;
};
TraceLoss trace_loss(const nn::NetworkParams& params, const RolloutTrace& trace,
                     double entropy_beta);

struct EpisodeOptions {
    int steps = 6;
    double gamma = 0.95;
    SampleMode mode = SampleMode::sample;
    std::uint64_t seed = 0;
};

/// One enhancement episode: forward, select, apply the adjustment curve,
/// score. The trace stores states, chosen-action log probabilities, value
/// maps (including the terminal bootstrap), entropies, and rewards.
RolloutTrace run_episode(const nn::NetworkParams& params, const ImageTensor& s0,
                         const EpisodeOptions& opt, Oracle& oracle, const RewardWeights& weights,
                         const ActionSpace& space);

struct EnhanceResult {
    std::vector<ImageTensor> states; // s^1..s^steps
    std::vector<ActionMap> maps;     // the greedy coefficient map of each step
};

/// Greedy rollout for inference; returns every intermediate state.
EnhanceResult enhance(const nn::NetworkParams& params, const ImageTensor& img, int steps,
                      const ActionSpace& space);

using LogSink = std::function<void(const std::string&)>;

struct TrainResult {
    nn::NetworkParams params; // final shared parameters, snapped to f32
    std::int64_t episodes = 0;
    std::int64_t updates = 0;
};

/// Actor-learner training: `workers` threads snapshot the shared parameters,
/// roll out a batch of episodes, and apply the accumulated gradients through
/// a shared Adam under a coarse lock. The episode budget is
/// epochs * dataset size; episode k always enhances image k mod dataset
/// size with a seed derived from (config seed, k), so the work items are
/// identical for any worker count and the run is bit-reproducible with
/// workers=1. Emits one CSV record per step and per episode into `sink`
/// (header included; the wall-time column is the only nondeterministic
/// field).
TrainResult train(const TrainConfig& cfg, const std::vector<ImageTensor>& dataset, Oracle& oracle,
                  const LogSink& sink);

/// Column layout of the training log, exposed for the CLI and tests.
std::string train_log_header();

} // namespace relight
