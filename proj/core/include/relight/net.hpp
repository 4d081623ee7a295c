#pragma once

#include "relight/graph.hpp"
#include "relight/image.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace relight::nn {

/// Fully convolutional trunk + two heads. All kernels are square with zero
/// padding that preserves spatial dimensions.
struct NetSpec {
    int in_channels = 3;
    int trunk_channels = 32;
    int trunk_layers = 4;
    int kernel = 3;
    int action_count = 28;

    bool operator==(const NetSpec&) const = default;

    /// Single-line architecture descriptor, e.g.
    /// "conv-trunk in=3 trunk=32 layers=4 kernel=3 actions=28".
    std::string descriptor() const;
    static NetSpec parse_descriptor(const std::string& line);
    void validate() const;
};

/// Named, ordered parameter tensors (graph leaves). Order is fixed by the
/// spec: trunk.<i>.weight / trunk.<i>.bias, policy.weight, policy.bias,
/// value.weight, value.bias.
struct NetworkParams {
    NetSpec spec;
    std::vector<std::pair<std::string, NodePtr>> tensors;

    static NetworkParams init(const NetSpec& spec, std::uint64_t seed);
    /// All-zero parameters (uniform policy, zero value map).
    static NetworkParams zeros(const NetSpec& spec);

    const NodePtr& find(std::string_view name) const;
    NetworkParams clone() const;
    /// Copy parameter values (not gradients) from a same-shaped instance.
    void assign_values(const NetworkParams& src);
    void zero_grads();
    std::size_t parameter_count() const;
    /// Round every parameter to the nearest 32-bit float value, in place.
    /// Matches what a checkpoint round-trip produces.
    void snap_to_f32();
};

struct NetOutput {
    NodePtr policy_logits; // action_count x H x W
    NodePtr log_probs;     // log-softmax of the logits over the action axis
    NodePtr value;         // 1 x H x W
};

/// Shared-trunk forward pass on one RGB state. Records the graph; call
/// backward() on a loss built from the outputs to populate parameter
/// gradients.
NetOutput forward_net(const NetworkParams& params, const ImageTensor& state);

/// HWC image -> CxHxW constant node.
NodePtr image_to_node(const ImageTensor& img);

} // namespace relight::nn
