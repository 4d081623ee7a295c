#pragma once

#include "relight/image.hpp"

#include <array>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

namespace relight {

/// Probability over the ratings 1..10. probs[k] is the probability of
/// rating k+1. Entries are non-negative and sum to 1 (within 1e-9).
struct RatingDistribution {
    std::array<double, 10> probs{};
};

void validate(const RatingDistribution& d);

/// Mean rating: sum of k * P_k for k = 1..10. Always in [1, 10].
double expected_score(const RatingDistribution& d);

/// Fixed weighted sum of the four attribute opinion scores
/// (light/color, composition, imaging quality, semantics).
/// The weights sum to exactly 1.
double aesthetic_mean_opinion_score(double f1, double f2, double f3, double f4);

/// Closed-form heuristic scorer parameters. The score rewards mid-level
/// exposure, usable contrast, some saturation and few clipped pixels,
/// which is enough signal to steer training without a learned model.
struct ProxyParams {
    double target_luminance = 0.55;
    double contrast_scale = 0.18;
    double saturation_scale = 0.3;
    double clip_lo = 0.02;
    double clip_hi = 0.98;
    double sigma = 1.5; // rating spread of the emitted distribution
    double w_exposure = 0.4;
    double w_contrast = 0.3;
    double w_saturation = 0.15;
    double w_clip = 0.15;
};

struct OracleConfig {
    enum class Kind { proxy, external };
    Kind kind = Kind::proxy;
    ProxyParams proxy;
    std::string external_cmd; // shell command for Kind::external
    double timeout_s = 30.0;
};

/// Black-box source of rating distributions. Implementations must be
/// deterministic for a fixed image.
class Oracle {
public:
    virtual ~Oracle() = default;
    virtual RatingDistribution score(const ImageTensor& img) = 0;
};

/// Deterministic closed-form scorer; pure and reentrant.
class ProxyOracle final : public Oracle {
public:
    explicit ProxyOracle(ProxyParams params = {});

    RatingDistribution score(const ImageTensor& img) override;

    /// Intermediate statistics, exposed for inspection tooling.
    struct Components {
        double mean_luminance;
        double luminance_std;
        double mean_saturation;
        double clip_fraction;
        double quality;     // weighted combination in [0, 1]
        double rating_mean; // 1 + 9 * quality
    };
    Components components(const ImageTensor& img) const;

    const ProxyParams& params() const { return params_; }

private:
    ProxyParams params_;
};

/// Scores through a child process speaking a line protocol: one image path
/// per request line on its stdin, one response line of 10 space-separated
/// floats on its stdout. Requests are serialized; a response must arrive
/// within the configured timeout. Nonzero child output problems raise
/// OracleError carrying whatever the child actually produced.
class ExternalOracle final : public Oracle {
public:
    ExternalOracle(std::string command, double timeout_s = 30.0);
    ~ExternalOracle() override;

    ExternalOracle(const ExternalOracle&) = delete;
    ExternalOracle& operator=(const ExternalOracle&) = delete;

    RatingDistribution score(const ImageTensor& img) override;

private:
    void start();
    void stop();

    std::string command_;
    double timeout_s_;
    std::mutex mutex_;
    int child_pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string read_buffer_;
    std::filesystem::path scratch_dir_;
    unsigned long request_count_ = 0;
};

/// Content-hash memoization wrapper so identical states are scored once
/// per process.
class CachingOracle final : public Oracle {
public:
    explicit CachingOracle(std::unique_ptr<Oracle> inner, std::size_t max_entries = 1 << 16);

    RatingDistribution score(const ImageTensor& img) override;

    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }

private:
    std::unique_ptr<Oracle> inner_;
    std::size_t max_entries_;
    std::mutex mutex_;
    std::unordered_map<std::uint64_t, RatingDistribution> cache_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
};

/// Builds the configured oracle wrapped in a cache.
std::unique_ptr<Oracle> make_oracle(const OracleConfig& config);

} // namespace relight
