#include "relight/agent.hpp"

#include "relight/errors.hpp"
#include "relight/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

namespace relight {

void RolloutTrace::validate() const {
    const std::size_t n = action_maps.size();
    if (states.size() != n + 1 || log_probs.size() != n || value_maps.size() != n + 1 ||
        entropies.size() != n || rewards.size() != n)
        throw ShapeError{"rollout trace has inconsistent lengths"};
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw ConfigError{"trace gamma must lie in (0, 1], got " + std::to_string(gamma)};
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t plane = states[t].pixel_count();
        if (log_probs[t].size() != plane || value_maps[t].size() != plane)
            throw ShapeError{"trace maps do not match state dimensions at step " +
                             std::to_string(t)};
    }
    if (value_maps[n].size() != states[n].pixel_count())
        throw ShapeError{"trace bootstrap value map does not match final state"};
}

nn::NetSpec TrainConfig::net_spec() const {
    nn::NetSpec s;
    s.in_channels = 3;
    s.trunk_channels = net_channels;
    s.trunk_layers = net_layers;
    s.kernel = 3;
    s.action_count = space.count();
    return s;
}

void TrainConfig::validate() const {
    if (steps < 1) throw ConfigError{"steps must be >= 1"};
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError{"gamma must lie in (0, 1]"};
    if (workers < 1) throw ConfigError{"workers must be >= 1"};
    if (t_max < 0) throw ConfigError{"t_max must be >= 0"};
    if (epochs < 0) throw ConfigError{"epochs must be >= 0"};
    if (batch < 1) throw ConfigError{"batch must be >= 1"};
    if (!(learning_rate > 0.0)) throw ConfigError{"learning rate must be positive"};
    if (entropy_beta < 0.0) throw ConfigError{"entropy beta must be >= 0"};
    if (rewards.w_aes < 0.0 || rewards.w_fea < 0.0 || rewards.w_exp < 0.0 ||
        rewards.lambda < 0.0 || rewards.exposure_block < 1)
        throw ConfigError{"reward weights must be non-negative, exposure block >= 1"};
    net_spec().validate();
}

ActionMap sample_actions(std::span<const double> probs, const ActionSpace& space, int height,
                         int width, SampleMode mode, std::uint64_t seed) {
    const int count = space.count();
    const std::size_t plane = static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    if (probs.size() != plane * static_cast<std::size_t>(count))
        throw ShapeError{"sample_actions: probability tensor size mismatch"};
    ActionMap map = ActionMap::constant(space, height, width, 0);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const std::size_t p = static_cast<std::size_t>(y) * width + x;
            int pick = 0;
            if (mode == SampleMode::greedy) {
                double best = probs[p];
                for (int k = 1; k < count; ++k) {
                    const double v = probs[static_cast<std::size_t>(k) * plane + p];
                    if (v > best) {
                        best = v;
                        pick = k;
                    }
                }
            } else {
                const double u = counter_u01(seed, static_cast<std::uint64_t>(y),
                                             static_cast<std::uint64_t>(x));
                double acc = 0.0;
                pick = count - 1; // fallback if rounding leaves u past the last bucket
                for (int k = 0; k < count; ++k) {
                    acc += probs[static_cast<std::size_t>(k) * plane + p];
                    if (u < acc) {
                        pick = k;
                        break;
                    }
                }
            }
            map.set_index(y, x, static_cast<std::uint8_t>(pick));
        }
    return map;
}

double discounted_return(std::span<const double> rewards, double bootstrap, double gamma, int t,
                         int n) {
    if (t < 0 || t >= n) throw ShapeError{"discounted_return: need 0 <= t < n"};
    if (rewards.size() != static_cast<std::size_t>(n - t))
        throw ShapeError{"discounted_return: expected " + std::to_string(n - t) + " rewards, got " +
                         std::to_string(rewards.size())};
    double acc = 0.0;
    double g = 1.0;
    for (int i = 0; i < n - t; ++i) {
        acc += g * rewards[static_cast<std::size_t>(i)];
        g *= gamma;
    }
    return acc + g * bootstrap;
}

std::vector<double> returns_backward(std::span<const double> rewards, double bootstrap,
                                     double gamma) {
    std::vector<double> out(rewards.size());
    double r = bootstrap;
    for (std::size_t i = rewards.size(); i-- > 0;) {
        r = rewards[i] + gamma * r;
        out[i] = r;
    }
    return out;
}

namespace {

double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

} // namespace

TraceLoss trace_loss(const nn::NetworkParams& params, const RolloutTrace& trace,
                     double entropy_beta) {
    trace.validate();
    const int n = trace.steps();
    if (n == 0) throw ShapeError{"trace_loss: trace has no steps"};

    std::vector<double> totals(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) totals[static_cast<std::size_t>(t)] = trace.rewards[static_cast<std::size_t>(t)].total;
    const double bootstrap = mean_of(trace.value_maps.back());
    const std::vector<double> returns = returns_backward(totals, bootstrap, trace.gamma);

    TraceLoss out;
    nn::NodePtr total;
    for (int t = 0; t < n; ++t) {
        const std::size_t ti = static_cast<std::size_t>(t);
        const ImageTensor& state = trace.states[ti];
        const std::size_t plane = state.pixel_count();
        nn::NetOutput net = nn::forward_net(params, state);

        // policy term: -log pi(a) * G with the advantage frozen from the trace
        nn::Tensor g_map{{1, state.height, state.width}};
        for (std::size_t p = 0; p < plane; ++p)
            g_map.v[p] = advantage(returns[ti], trace.value_maps[ti][p]);
        nn::NodePtr chosen = nn::gather_channels(net.log_probs, trace.action_maps[ti].indices);
        nn::NodePtr policy_t =
            nn::scale(nn::mean_all(nn::mul(chosen, nn::constant(std::move(g_map)))), -1.0);

        // value term: squared error against the frozen return
        nn::NodePtr target =
            nn::constant(nn::Tensor::full({1, state.height, state.width}, returns[ti]));
        nn::NodePtr vdiff = nn::sub(net.value, target);
        nn::NodePtr value_t = nn::mean_all(nn::mul(vdiff, vdiff));

        // entropy bonus: mean per-pixel policy entropy
        nn::NodePtr plogp = nn::mul(nn::exp_elem(net.log_probs), net.log_probs);
        nn::NodePtr entropy_t =
            nn::scale(nn::sum_all(plogp), -1.0 / static_cast<double>(plane));

        out.policy += policy_t->value.v[0];
        out.value += value_t->value.v[0];
        out.entropy += entropy_t->value.v[0];
        nn::NodePtr loss_t = nn::add(nn::add(policy_t, nn::scale(value_t, 0.5)),
                                     nn::scale(entropy_t, -entropy_beta));
        total = total ? nn::add(total, loss_t) : loss_t;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    out.total = nn::scale(total, inv_n);
    out.policy *= inv_n;
    out.value *= inv_n;
    out.entropy *= inv_n;
    return out;
}

namespace {

/// Rollout of `steps` transitions starting at s0, with reward smoothness
/// computed over `prefix` + the maps produced here. first_step offsets the
/// per-step sampling counters so chunked rollouts of one episode never reuse
/// a counter.
RolloutTrace run_segment(const nn::NetworkParams& params, const ImageTensor& s0,
                         const EpisodeOptions& opt, Oracle& oracle, const RewardWeights& weights,
                         const ActionSpace& space, std::vector<ActionMap>& prefix,
                         int first_step) {
    validate(s0);
    if (opt.steps < 0) throw ConfigError{"episode steps must be >= 0"};
    if (space.count() != params.spec.action_count)
        throw ShapeError{"action space size " + std::to_string(space.count()) +
                         " does not match network policy head " +
                         std::to_string(params.spec.action_count)};

    RolloutTrace tr;
    tr.gamma = opt.gamma;
    tr.states.push_back(s0);
    const std::size_t plane = s0.pixel_count();

    ImageTensor cur = s0;
    for (int t = 0; t < opt.steps; ++t) {
        nn::NetOutput net = nn::forward_net(params, cur);
        const std::vector<double>& logp = net.log_probs->value.v;
        std::vector<double> probs(logp.size());
        for (std::size_t i = 0; i < logp.size(); ++i) probs[i] = std::exp(logp[i]);

        const std::uint64_t step_seed =
            hash_combine(opt.seed, static_cast<std::uint64_t>(first_step + t));
        ActionMap map = sample_actions(probs, space, cur.height, cur.width, opt.mode, step_seed);

        std::vector<double> chosen(plane);
        for (std::size_t p = 0; p < plane; ++p)
            chosen[p] = logp[static_cast<std::size_t>(map.indices[p]) * plane + p];
        double ent = 0.0;
        for (std::size_t i = 0; i < logp.size(); ++i) ent -= probs[i] * logp[i];
        ent /= static_cast<double>(plane);

        tr.value_maps.push_back(net.value->value.v);

        ImageTensor next = apply_curve(cur, map);
        prefix.push_back(map);
        const RewardBreakdown rb = step_reward(oracle, weights, next, cur, prefix);

        tr.action_maps.push_back(std::move(map));
        tr.log_probs.push_back(std::move(chosen));
        tr.entropies.push_back(ent);
        tr.rewards.push_back(rb);
        tr.states.push_back(next);
        cur = std::move(next);
    }
    nn::NetOutput net = nn::forward_net(params, cur);
    tr.value_maps.push_back(net.value->value.v);
    return tr;
}

} // namespace

RolloutTrace run_episode(const nn::NetworkParams& params, const ImageTensor& s0,
                         const EpisodeOptions& opt, Oracle& oracle, const RewardWeights& weights,
                         const ActionSpace& space) {
    std::vector<ActionMap> prefix;
    return run_segment(params, s0, opt, oracle, weights, space, prefix, 0);
}

EnhanceResult enhance(const nn::NetworkParams& params, const ImageTensor& img, int steps,
                      const ActionSpace& space) {
    validate(img);
    if (steps < 1) throw ConfigError{"enhance: steps must be >= 1"};
    if (space.count() != params.spec.action_count)
        throw ShapeError{"action space size does not match network policy head"};
    EnhanceResult out;
    ImageTensor cur = img;
    for (int t = 0; t < steps; ++t) {
        nn::NetOutput net = nn::forward_net(params, cur);
        const std::vector<double>& logp = net.log_probs->value.v;
        // greedy on log probabilities == greedy on probabilities
        ActionMap map = sample_actions(std::span<const double>{logp}, space, cur.height, cur.width,
                                       SampleMode::greedy, 0);
        cur = apply_curve(cur, map);
        out.states.push_back(cur);
        out.maps.push_back(std::move(map));
    }
    return out;
}

namespace {

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

struct SharedTrainState {
    std::mutex mu;
    nn::NetworkParams params;
    nn::Adam adam;
    std::int64_t next_episode = 0;
    std::int64_t budget = 0;
    std::int64_t updates = 0;

    SharedTrainState(nn::NetworkParams p, nn::AdamConfig ac) : params(std::move(p)), adam(params, ac) {}
};

/// Copies locally accumulated gradients onto the shared parameters, applies
/// one Adam step, and flushes the batch's log rows. Must own no lock on
/// entry.
void push_update(SharedTrainState& st, nn::NetworkParams& local,
                 const std::vector<std::string>& rows, const LogSink& sink) {
    std::lock_guard<std::mutex> lk{st.mu};
    for (std::size_t i = 0; i < local.tensors.size(); ++i) {
        nn::Node& src = *local.tensors[i].second;
        nn::Node& dst = *st.params.tensors[i].second;
        src.ensure_grad();
        dst.grad = src.grad;
    }
    st.adam.step(st.params);
    ++st.updates;
    if (sink)
        for (const std::string& r : rows) sink(r);
    local.zero_grads();
}

} // namespace

std::string train_log_header() {
    return "record,epoch,worker,episode,image,step,r_aes,r_fea,r_exp,r_total,"
           "loss_policy,loss_value,entropy,loss_total,wall_ms";
}

TrainResult train(const TrainConfig& cfg, const std::vector<ImageTensor>& dataset, Oracle& oracle,
                  const LogSink& sink) {
    cfg.validate();
    if (dataset.empty()) throw ConfigError{"training dataset is empty"};
    for (const ImageTensor& img : dataset) validate(img);

    SharedTrainState st{nn::NetworkParams::init(cfg.net_spec(), cfg.seed),
                        nn::AdamConfig{.lr = cfg.learning_rate}};
    st.budget = static_cast<std::int64_t>(cfg.epochs) * static_cast<std::int64_t>(dataset.size());
    if (sink) sink(train_log_header());

    const int chunk_len = (cfg.t_max == 0 || cfg.t_max >= cfg.steps) ? cfg.steps : cfg.t_max;

    auto worker = [&](int wid) {
        while (true) {
            std::int64_t first = 0;
            int take = 0;
            nn::NetworkParams local;
            {
                std::lock_guard<std::mutex> lk{st.mu};
                if (st.next_episode >= st.budget) return;
                first = st.next_episode;
                take = static_cast<int>(
                    std::min<std::int64_t>(cfg.batch, st.budget - st.next_episode));
                st.next_episode += take;
                local = st.params.clone();
            }

            // Per-episode rollout position, carried across chunks.
            std::vector<ImageTensor> cur;
            std::vector<std::vector<ActionMap>> prefixes(static_cast<std::size_t>(take));
            std::vector<double> ep_return(static_cast<std::size_t>(take), 0.0);
            std::vector<double> ep_policy(static_cast<std::size_t>(take), 0.0);
            std::vector<double> ep_value(static_cast<std::size_t>(take), 0.0);
            std::vector<double> ep_entropy(static_cast<std::size_t>(take), 0.0);
            std::vector<double> ep_total(static_cast<std::size_t>(take), 0.0);
            std::vector<std::string> rows;
            const auto t0 = std::chrono::steady_clock::now();

            for (int j = 0; j < take; ++j)
                cur.push_back(dataset[static_cast<std::size_t>(
                    (first + j) % static_cast<std::int64_t>(dataset.size()))]);

            int chunks = 0;
            for (int done = 0; done < cfg.steps; done += chunk_len) {
                const int len = std::min(chunk_len, cfg.steps - done);
                if (done > 0) {
                    // later chunks re-sync with the shared parameters
                    std::lock_guard<std::mutex> lk{st.mu};
                    local.assign_values(st.params);
                }
                for (int j = 0; j < take; ++j) {
                    const std::int64_t e = first + j;
                    EpisodeOptions opt;
                    opt.steps = len;
                    opt.gamma = cfg.gamma;
                    opt.mode = SampleMode::sample;
                    opt.seed = hash_combine(cfg.seed, static_cast<std::uint64_t>(e));
                    RolloutTrace tr = run_segment(local, cur[static_cast<std::size_t>(j)], opt,
                                                  oracle, cfg.rewards, cfg.space,
                                                  prefixes[static_cast<std::size_t>(j)], done);
                    TraceLoss loss = trace_loss(local, tr, cfg.entropy_beta);
                    nn::backward(nn::scale(loss.total, 1.0 / static_cast<double>(take)));

                    const std::int64_t epoch = e / static_cast<std::int64_t>(dataset.size()) + 1;
                    const std::int64_t img_idx = e % static_cast<std::int64_t>(dataset.size());
                    for (int t = 0; t < len; ++t) {
                        const RewardBreakdown& rb = tr.rewards[static_cast<std::size_t>(t)];
                        rows.push_back("step," + std::to_string(epoch) + ',' +
                                       std::to_string(wid) + ',' + std::to_string(e) + ',' +
                                       std::to_string(img_idx) + ',' +
                                       std::to_string(done + t + 1) + ',' + fmt_g(rb.aes) + ',' +
                                       fmt_g(rb.fea) + ',' + fmt_g(rb.exp) + ',' + fmt_g(rb.total) +
                                       ",,,,,");
                        ep_return[static_cast<std::size_t>(j)] += rb.total;
                    }
                    ep_policy[static_cast<std::size_t>(j)] += loss.policy;
                    ep_value[static_cast<std::size_t>(j)] += loss.value;
                    ep_entropy[static_cast<std::size_t>(j)] += loss.entropy;
                    ep_total[static_cast<std::size_t>(j)] += loss.total->value.v[0];
                    cur[static_cast<std::size_t>(j)] = tr.states.back();
                }
                push_update(st, local, rows, sink);
                rows.clear();
                ++chunks;
            }

            const double wall_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count() /
                static_cast<double>(take);
            std::vector<std::string> ep_rows;
            for (int j = 0; j < take; ++j) {
                const std::int64_t e = first + j;
                const std::int64_t epoch = e / static_cast<std::int64_t>(dataset.size()) + 1;
                const std::int64_t img_idx = e % static_cast<std::int64_t>(dataset.size());
                const double inv = 1.0 / static_cast<double>(chunks);
                char wall[32];
                std::snprintf(wall, sizeof wall, "%.3f", wall_ms);
                ep_rows.push_back(
                    "episode," + std::to_string(epoch) + ',' + std::to_string(wid) + ',' +
                    std::to_string(e) + ',' + std::to_string(img_idx) + ",," + ",,," +
                    fmt_g(ep_return[static_cast<std::size_t>(j)]) + ',' +
                    fmt_g(ep_policy[static_cast<std::size_t>(j)] * inv) + ',' +
                    fmt_g(ep_value[static_cast<std::size_t>(j)] * inv) + ',' +
                    fmt_g(ep_entropy[static_cast<std::size_t>(j)] * inv) + ',' +
                    fmt_g(ep_total[static_cast<std::size_t>(j)] * inv) + ',' + wall);
            }
            {
                std::lock_guard<std::mutex> lk{st.mu};
                if (sink)
                    for (const std::string& r : ep_rows) sink(r);
            }
        }
    };

    if (cfg.workers == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(cfg.workers));
        for (int w = 0; w < cfg.workers; ++w) pool.emplace_back(worker, w);
        for (std::thread& t : pool) t.join();
    }

    st.params.snap_to_f32();
    TrainResult out;
    out.params = std::move(st.params);
    out.episodes = st.next_episode;
    out.updates = st.updates;
    return out;
}

} // namespace relight
