#include "relight/graph.hpp"

#include "relight/errors.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace relight::nn {

void Node::ensure_grad() {
    if (grad.size() != numel()) grad.assign(numel(), 0.0);
}

void Node::zero_grad() {
    grad.assign(numel(), 0.0);
}

NodePtr leaf(Tensor t) {
    return std::make_shared<Node>(std::move(t), true);
}

NodePtr constant(Tensor t) {
    return std::make_shared<Node>(std::move(t), false);
}

namespace {

void require_same_shape(const NodePtr& a, const NodePtr& b, const char* op) {
    if (!a->value.same_shape(b->value))
        throw ShapeError{std::string{op} + ": shape mismatch " + shape_to_string(a->value.shape) +
                         " vs " + shape_to_string(b->value.shape)};
}

NodePtr binary_elementwise(const NodePtr& a, const NodePtr& b, const char* name,
                           double (*fwd)(double, double), void (*bwd)(Node*, Node*, Node*)) {
    require_same_shape(a, b, name);
    Tensor out{a->value.shape};
    for (std::size_t i = 0; i < out.numel(); ++i) out.v[i] = fwd(a->value.v[i], b->value.v[i]);
    auto node = std::make_shared<Node>(std::move(out));
    node->inputs = {a, b};
    Node* o = node.get();
    node->backprop = [o, a, b, bwd] { bwd(o, a.get(), b.get()); };
    return node;
}

} // namespace

NodePtr add(const NodePtr& a, const NodePtr& b) {
    return binary_elementwise(
        a, b, "add", [](double x, double y) { return x + y; },
        [](Node* o, Node* a, Node* b) {
            a->ensure_grad();
            b->ensure_grad();
            for (std::size_t i = 0; i < o->numel(); ++i) {
                a->grad[i] += o->grad[i];
                b->grad[i] += o->grad[i];
            }
        });
}

NodePtr sub(const NodePtr& a, const NodePtr& b) {
    return binary_elementwise(
        a, b, "sub", [](double x, double y) { return x - y; },
        [](Node* o, Node* a, Node* b) {
            a->ensure_grad();
            b->ensure_grad();
            for (std::size_t i = 0; i < o->numel(); ++i) {
                a->grad[i] += o->grad[i];
                b->grad[i] -= o->grad[i];
            }
        });
}

NodePtr mul(const NodePtr& a, const NodePtr& b) {
    return binary_elementwise(
        a, b, "mul", [](double x, double y) { return x * y; },
        [](Node* o, Node* a, Node* b) {
            a->ensure_grad();
            b->ensure_grad();
            for (std::size_t i = 0; i < o->numel(); ++i) {
                a->grad[i] += o->grad[i] * b->value.v[i];
                b->grad[i] += o->grad[i] * a->value.v[i];
            }
        });
}

NodePtr scale(const NodePtr& a, double k) {
    Tensor out{a->value.shape};
    for (std::size_t i = 0; i < out.numel(); ++i) out.v[i] = a->value.v[i] * k;
    auto node = std::make_shared<Node>(std::move(out));
    node->inputs = {a};
    Node* o = node.get();
    node->backprop = [o, a, k] {
        a->ensure_grad();
        for (std::size_t i = 0; i < o->numel(); ++i) a->grad[i] += o->grad[i] * k;
    };
    return node;
}

NodePtr relu(const NodePtr& a) {
    Tensor out{a->value.shape};
    for (std::size_t i = 0; i < out.numel(); ++i) out.v[i] = std::max(0.0, a->value.v[i]);
    auto node = std::make_shared<Node>(std::move(out));
    node->inputs = {a};
    Node* o = node.get();
    node->backprop = [o, a] {
        a->ensure_grad();
        for (std::size_t i = 0; i < o->numel(); ++i)
            if (a->value.v[i] > 0.0) a->grad[i] += o->grad[i];
    };
    return node;
}

NodePtr exp_elem(const NodePtr& a) {
    Tensor out{a->value.shape};
    for (std::size_t i = 0; i < out.numel(); ++i) out.v[i] = std::exp(a->value.v[i]);
    auto node = std::make_shared<Node>(std::move(out));
    node->inputs = {a};
    Node* o = node.get();
    node->backprop = [o, a] {
        a->ensure_grad();
        for (std::size_t i = 0; i < o->numel(); ++i) a->grad[i] += o->grad[i] * o->value.v[i];
    };
    return node;
}

NodePtr sum_all(const NodePtr& a) {
    double acc = 0.0;
    for (double x : a->value.v) acc += x;
    auto node = std::make_shared<Node>(Tensor{{1}, {acc}});
    node->inputs = {a};
    Node* o = node.get();
    node->backprop = [o, a] {
        a->ensure_grad();
        const double g = o->grad[0];
        for (std::size_t i = 0; i < a->numel(); ++i) a->grad[i] += g;
    };
    return node;
}

NodePtr mean_all(const NodePtr& a) {
    return scale(sum_all(a), 1.0 / static_cast<double>(a->numel()));
}

NodePtr conv2d(const NodePtr& x, const NodePtr& w, const NodePtr& b) {
    const auto& xs = x->value.shape;
    const auto& ws = w->value.shape;
    const auto& bs = b->value.shape;
    if (xs.size() != 3 || ws.size() != 4 || bs.size() != 1)
        throw ShapeError{"conv2d: expected CxHxW input, OxCxKxK weight, O bias"};
    const int ci = xs[0], h = xs[1], wd = xs[2];
    const int co = ws[0], k = ws[2];
    if (ws[1] != ci || ws[3] != k || bs[0] != co || k % 2 == 0)
        throw ShapeError{"conv2d: inconsistent shapes " + shape_to_string(xs) + " / " +
                         shape_to_string(ws) + " / " + shape_to_string(bs)};
    const int pad = k / 2;

    Tensor out{{co, h, wd}};
    const double* xv = x->value.v.data();
    const double* wv = w->value.v.data();
    for (int o = 0; o < co; ++o) {
        const double bias = b->value.v[static_cast<std::size_t>(o)];
        double* ov = out.v.data() + static_cast<std::size_t>(o) * h * wd;
        for (std::size_t i = 0; i < static_cast<std::size_t>(h) * wd; ++i) ov[i] = bias;
        for (int i = 0; i < ci; ++i) {
            const double* xc = xv + static_cast<std::size_t>(i) * h * wd;
            const double* wk = wv + (static_cast<std::size_t>(o) * ci + i) * k * k;
            for (int dy = 0; dy < k; ++dy)
                for (int dx = 0; dx < k; ++dx) {
                    const double wgt = wk[dy * k + dx];
                    if (wgt == 0.0) continue;
                    const int y0 = std::max(0, pad - dy), y1 = std::min(h, h + pad - dy);
                    const int x0 = std::max(0, pad - dx), x1 = std::min(wd, wd + pad - dx);
                    for (int y = y0; y < y1; ++y) {
                        const double* xr = xc + static_cast<std::size_t>(y + dy - pad) * wd;
                        double* orow = ov + static_cast<std::size_t>(y) * wd;
                        for (int xx = x0; xx < x1; ++xx)
                            orow[xx] += wgt * xr[xx + dx - pad];
                    }
                }
        }
    }

    auto node = std::make_shared<Node>(std::move(out));
    node->inputs = {x, w, b};
    Node* on = node.get();
    node->backprop = [on, x, w, b, ci, co, h, wd, k, pad] {
        x->ensure_grad();
        w->ensure_grad();
        b->ensure_grad();
        const double* gv = on->grad.data();
        const double* xv = x->value.v.data();
        const double* wv = w->value.v.data();
        for (int o = 0; o < co; ++o) {
            const double* gc = gv + static_cast<std::size_t>(o) * h * wd;
            double gb = 0.0;
            for (std::size_t i = 0; i < static_cast<std::size_t>(h) * wd; ++i) gb += gc[i];
            b->grad[static_cast<std::size_t>(o)] += gb;
            for (int i = 0; i < ci; ++i) {
                const double* xc = xv + static_cast<std::size_t>(i) * h * wd;
                double* gxc = x->grad.data() + static_cast<std::size_t>(i) * h * wd;
                const std::size_t wbase = (static_cast<std::size_t>(o) * ci + i) * k * k;
                for (int dy = 0; dy < k; ++dy)
                    for (int dx = 0; dx < k; ++dx) {
                        const int y0 = std::max(0, pad - dy), y1 = std::min(h, h + pad - dy);
                        const int x0 = std::max(0, pad - dx), x1 = std::min(wd, wd + pad - dx);
                        double gw = 0.0;
                        const double wgt = wv[wbase + static_cast<std::size_t>(dy) * k + dx];
                        for (int y = y0; y < y1; ++y) {
                            const double* xr = xc + static_cast<std::size_t>(y + dy - pad) * wd;
                            double* gxr = gxc + static_cast<std::size_t>(y + dy - pad) * wd;
                            const double* grow = gc + static_cast<std::size_t>(y) * wd;
                            for (int xx = x0; xx < x1; ++xx) {
                                gw += grow[xx] * xr[xx + dx - pad];
                                gxr[xx + dx - pad] += grow[xx] * wgt;
                            }
                        }
                        w->grad[wbase + static_cast<std::size_t>(dy) * k + dx] += gw;
                    }
            }
        }
    };
    return node;
}

NodePtr log_softmax_channels(const NodePtr& x) {
    const auto& xs = x->value.shape;
    if (xs.size() != 3) throw ShapeError{"log_softmax_channels: expected CxHxW"};
    const int c = xs[0], h = xs[1], w = xs[2];
    const std::size_t plane = static_cast<std::size_t>(h) * w;

    Tensor out{xs};
    for (std::size_t p = 0; p < plane; ++p) {
        double mx = x->value.v[p];
        for (int ch = 1; ch < c; ++ch) mx = std::max(mx, x->value.v[static_cast<std::size_t>(ch) * plane + p]);
        double denom = 0.0;
        for (int ch = 0; ch < c; ++ch)
            denom += std::exp(x->value.v[static_cast<std::size_t>(ch) * plane + p] - mx);
        const double lse = mx + std::log(denom);
        for (int ch = 0; ch < c; ++ch)
            out.v[static_cast<std::size_t>(ch) * plane + p] =
                x->value.v[static_cast<std::size_t>(ch) * plane + p] - lse;
    }

    auto node = std::make_shared<Node>(std::move(out));
    node->inputs = {x};
    Node* o = node.get();
    node->backprop = [o, x, c, plane] {
        x->ensure_grad();
        for (std::size_t p = 0; p < plane; ++p) {
            double gsum = 0.0;
            for (int ch = 0; ch < c; ++ch) gsum += o->grad[static_cast<std::size_t>(ch) * plane + p];
            for (int ch = 0; ch < c; ++ch) {
                const std::size_t idx = static_cast<std::size_t>(ch) * plane + p;
                x->grad[idx] += o->grad[idx] - std::exp(o->value.v[idx]) * gsum;
            }
        }
    };
    return node;
}

NodePtr gather_channels(const NodePtr& x, const std::vector<std::uint8_t>& indices) {
    const auto& xs = x->value.shape;
    if (xs.size() != 3) throw ShapeError{"gather_channels: expected CxHxW"};
    const int c = xs[0], h = xs[1], w = xs[2];
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    if (indices.size() != plane)
        throw ShapeError{"gather_channels: index map size " + std::to_string(indices.size()) +
                         " does not match " + std::to_string(plane) + " pixels"};
    Tensor out{{1, h, w}};
    for (std::size_t p = 0; p < plane; ++p) {
        if (indices[p] >= c) throw ShapeError{"gather_channels: index out of range"};
        out.v[p] = x->value.v[static_cast<std::size_t>(indices[p]) * plane + p];
    }
    auto node = std::make_shared<Node>(std::move(out));
    node->inputs = {x};
    Node* o = node.get();
    // copy of indices keeps the closure self-contained
    node->backprop = [o, x, indices, plane] {
        x->ensure_grad();
        for (std::size_t p = 0; p < plane; ++p)
            x->grad[static_cast<std::size_t>(indices[p]) * plane + p] += o->grad[p];
    };
    return node;
}

std::vector<Node*> topo_order(const NodePtr& root) {
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    // iterative post-order: (node, next input index to visit)
    std::vector<std::pair<Node*, std::size_t>> stack;
    stack.emplace_back(root.get(), 0);
    seen.insert(root.get());
    while (!stack.empty()) {
        auto& [node, idx] = stack.back();
        if (idx < node->inputs.size()) {
            Node* child = node->inputs[idx++].get();
            if (seen.insert(child).second) stack.emplace_back(child, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }
    return order;
}

void backward(const NodePtr& root) {
    if (!root) throw ShapeError{"backward: null root"};
    if (root->numel() != 1) throw ShapeError{"backward: root must be a scalar node"};
    std::vector<Node*> order = topo_order(root);
    for (Node* n : order) {
        if (n->is_leaf)
            n->ensure_grad(); // keep accumulated values
        else
            n->zero_grad();
    }
    root->grad[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it)
        if ((*it)->backprop) (*it)->backprop();
}

} // namespace relight::nn
