#include "relight/adam.hpp"

#include "relight/errors.hpp"

#include <cmath>

namespace relight::nn {

Adam::Adam(const NetworkParams& params, AdamConfig cfg) : cfg_{cfg} {
    m_.reserve(params.tensors.size());
    v_.reserve(params.tensors.size());
    for (const auto& [name, node] : params.tensors) {
        m_.emplace_back(node->numel(), 0.0);
        v_.emplace_back(node->numel(), 0.0);
    }
}

void Adam::step(NetworkParams& params) {
    if (params.tensors.size() != m_.size())
        throw ShapeError{"adam: optimizer built for a different parameter set"};
    ++step_count_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_count_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_count_));
    for (std::size_t i = 0; i < params.tensors.size(); ++i) {
        Node& node = *params.tensors[i].second;
        if (node.grad.size() != node.numel())
            throw ShapeError{"adam: missing gradient for '" + params.tensors[i].first + "'"};
        if (m_[i].size() != node.numel())
            throw ShapeError{"adam: moment shape mismatch for '" + params.tensors[i].first + "'"};
        for (std::size_t j = 0; j < node.numel(); ++j) {
            const double g = node.grad[j];
            m_[i][j] = cfg_.beta1 * m_[i][j] + (1.0 - cfg_.beta1) * g;
            v_[i][j] = cfg_.beta2 * v_[i][j] + (1.0 - cfg_.beta2) * g * g;
            const double mhat = m_[i][j] / bc1;
            const double vhat = v_[i][j] / bc2;
            node.value.v[j] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
        node.zero_grad();
    }
}

void Adam::restore(std::int64_t steps, std::vector<std::vector<double>> m,
                   std::vector<std::vector<double>> v) {
    if (m.size() != m_.size() || v.size() != v_.size())
        throw ShapeError{"adam: restore with mismatched moment count"};
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m[i].size() != m_[i].size() || v[i].size() != v_[i].size())
            throw ShapeError{"adam: restore with mismatched moment shapes"};
    step_count_ = steps;
    m_ = std::move(m);
    v_ = std::move(v);
}

} // namespace relight::nn
