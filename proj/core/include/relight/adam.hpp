#pragma once

#include "relight/net.hpp"

#include <cstdint>
#include <vector>

namespace relight::nn {

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Standard Adam with bias correction. Moment buffers parallel the
/// parameter list of the NetworkParams the optimizer was built for.
class Adam {
public:
    Adam(const NetworkParams& params, AdamConfig cfg = {});

    /// Applies one update from the accumulated gradients, then zeroes them.
    /// Throws if any parameter has no gradient buffer.
    void step(NetworkParams& params);

    std::int64_t steps() const { return step_count_; }
    const AdamConfig& config() const { return cfg_; }

    // Moment access for checkpointing; index parallels params.tensors.
    const std::vector<std::vector<double>>& first_moments() const { return m_; }
    const std::vector<std::vector<double>>& second_moments() const { return v_; }
    void restore(std::int64_t steps, std::vector<std::vector<double>> m,
                 std::vector<std::vector<double>> v);

private:
    AdamConfig cfg_;
    std::int64_t step_count_ = 0;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

} // namespace relight::nn
