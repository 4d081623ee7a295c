#pragma once

#include "relight/tensor.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace relight::nn {

class Node;
using NodePtr = std::shared_ptr<Node>;

/// One vertex of the recorded computation. Interior nodes hold a backprop
/// closure that reads this node's gradient and accumulates into its inputs'
/// gradients. Leaf nodes (parameters) keep their gradient buffers across
/// backward() calls so gradients accumulate additively until zero_grad();
/// interior gradients are cleared at the start of every sweep.
class Node {
public:
    Tensor value;
    std::vector<double> grad; // sized lazily, matches value.numel()
    std::vector<NodePtr> inputs;
    std::function<void()> backprop;
    bool is_leaf = false;

    explicit Node(Tensor t, bool leaf = false) : value(std::move(t)), is_leaf(leaf) {}

    std::size_t numel() const { return value.numel(); }
    void ensure_grad();
    void zero_grad();
};

NodePtr leaf(Tensor t);
NodePtr constant(Tensor t);

// Elementwise (shapes must match exactly).
NodePtr add(const NodePtr& a, const NodePtr& b);
NodePtr sub(const NodePtr& a, const NodePtr& b);
NodePtr mul(const NodePtr& a, const NodePtr& b);
NodePtr scale(const NodePtr& a, double k);
NodePtr relu(const NodePtr& a);
NodePtr exp_elem(const NodePtr& a);

// Reductions to a 1-element node.
NodePtr sum_all(const NodePtr& a);
NodePtr mean_all(const NodePtr& a);

/// 2-D convolution over a CxHxW input with an OxCxKxK weight and O bias,
/// stride 1, zero padding K/2 (spatial dims preserved; K odd).
NodePtr conv2d(const NodePtr& x, const NodePtr& w, const NodePtr& b);

/// Per-pixel log-softmax over the channel axis of a CxHxW tensor, with
/// max subtraction for stability.
NodePtr log_softmax_channels(const NodePtr& x);

/// Select one channel per pixel: x is CxHxW, indices is H*W row-major with
/// values in [0, C); result is 1xHxW.
NodePtr gather_channels(const NodePtr& x, const std::vector<std::uint8_t>& indices);

/// Reverse-mode sweep from a scalar (1-element) root. Seeds the root
/// gradient with 1, clears interior gradients reached from the root, and
/// accumulates into leaf gradients.
void backward(const NodePtr& root);

/// Deterministic topological order (inputs before consumers) of the graph
/// reachable from root. Exposed for tests.
std::vector<Node*> topo_order(const NodePtr& root);

} // namespace relight::nn
