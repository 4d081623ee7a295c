#include "relight/net.hpp"

#include "relight/errors.hpp"
#include "relight/rng.hpp"

#include <cmath>
#include <sstream>

namespace relight::nn {

void NetSpec::validate() const {
    if (in_channels < 1 || trunk_channels < 1 || trunk_layers < 1 || action_count < 1)
        throw ConfigError{"network spec: channel/layer/action counts must be positive"};
    if (kernel < 1 || kernel % 2 == 0)
        throw ConfigError{"network spec: kernel size must be odd, got " + std::to_string(kernel)};
}

std::string NetSpec::descriptor() const {
    std::ostringstream os;
    os << "conv-trunk in=" << in_channels << " trunk=" << trunk_channels
       << " layers=" << trunk_layers << " kernel=" << kernel << " actions=" << action_count;
    return os.str();
}

NetSpec NetSpec::parse_descriptor(const std::string& line) {
    std::istringstream is{line};
    std::string head;
    is >> head;
    if (head != "conv-trunk") throw FormatError{"unknown architecture descriptor: " + line};
    NetSpec spec;
    std::string tok;
    while (is >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw FormatError{"bad descriptor token: " + tok};
        const std::string key = tok.substr(0, eq);
        int val = 0;
        try {
            val = std::stoi(tok.substr(eq + 1));
        } catch (const std::exception&) {
            throw FormatError{"bad descriptor token: " + tok};
        }
        if (key == "in")
            spec.in_channels = val;
        else if (key == "trunk")
            spec.trunk_channels = val;
        else if (key == "layers")
            spec.trunk_layers = val;
        else if (key == "kernel")
            spec.kernel = val;
        else if (key == "actions")
            spec.action_count = val;
        else
            throw FormatError{"bad descriptor token: " + tok};
    }
    spec.validate();
    return spec;
}

namespace {

Tensor kaiming_uniform(std::vector<int> shape, int fan_in, Rng& rng) {
    Tensor t{std::move(shape)};
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (double& x : t.v) x = (2.0 * rng.next_u01() - 1.0) * limit;
    return t;
}

void push_conv(NetworkParams& p, const std::string& name, int out_c, int in_c, int k, Rng* rng) {
    const int fan_in = in_c * k * k;
    Tensor w = rng ? kaiming_uniform({out_c, in_c, k, k}, fan_in, *rng)
                   : Tensor::zeros({out_c, in_c, k, k});
    p.tensors.emplace_back(name + ".weight", leaf(std::move(w)));
    p.tensors.emplace_back(name + ".bias", leaf(Tensor::zeros({out_c})));
}

NetworkParams build(const NetSpec& spec, Rng* rng) {
    spec.validate();
    NetworkParams p;
    p.spec = spec;
    int in_c = spec.in_channels;
    for (int i = 0; i < spec.trunk_layers; ++i) {
        push_conv(p, "trunk." + std::to_string(i), spec.trunk_channels, in_c, spec.kernel, rng);
        in_c = spec.trunk_channels;
    }
    push_conv(p, "policy", spec.action_count, in_c, spec.kernel, rng);
    push_conv(p, "value", 1, in_c, spec.kernel, rng);
    return p;
}

} // namespace

NetworkParams NetworkParams::init(const NetSpec& spec, std::uint64_t seed) {
    Rng rng{seed};
    return build(spec, &rng);
}

NetworkParams NetworkParams::zeros(const NetSpec& spec) {
    return build(spec, nullptr);
}

const NodePtr& NetworkParams::find(std::string_view name) const {
    for (const auto& [n, t] : tensors)
        if (n == name) return t;
    throw ShapeError{"no parameter named '" + std::string{name} + "'"};
}

NetworkParams NetworkParams::clone() const {
    NetworkParams out;
    out.spec = spec;
    out.tensors.reserve(tensors.size());
    for (const auto& [name, node] : tensors) out.tensors.emplace_back(name, leaf(node->value));
    return out;
}

void NetworkParams::assign_values(const NetworkParams& src) {
    if (src.tensors.size() != tensors.size())
        throw ShapeError{"assign_values: parameter count mismatch"};
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        if (src.tensors[i].first != tensors[i].first ||
            !src.tensors[i].second->value.same_shape(tensors[i].second->value))
            throw ShapeError{"assign_values: tensor mismatch at '" + tensors[i].first + "'"};
        tensors[i].second->value.v = src.tensors[i].second->value.v;
    }
}

void NetworkParams::zero_grads() {
    for (auto& [name, node] : tensors) node->zero_grad();
}

std::size_t NetworkParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& [name, node] : tensors) n += node->numel();
    return n;
}

void NetworkParams::snap_to_f32() {
    for (auto& [name, node] : tensors)
        for (double& x : node->value.v) x = static_cast<double>(static_cast<float>(x));
}

NodePtr image_to_node(const ImageTensor& img) {
    Tensor t{{3, img.height, img.width}};
    const std::size_t plane = img.pixel_count();
    for (std::size_t p = 0; p < plane; ++p)
        for (int c = 0; c < 3; ++c)
            t.v[static_cast<std::size_t>(c) * plane + p] = img.data[p * 3 + static_cast<std::size_t>(c)];
    return constant(std::move(t));
}

NetOutput forward_net(const NetworkParams& params, const ImageTensor& state) {
    if (params.spec.in_channels != 3)
        throw ShapeError{"forward_net: image input requires a 3-channel network"};
    NodePtr h = image_to_node(state);
    for (int i = 0; i < params.spec.trunk_layers; ++i) {
        const std::string base = "trunk." + std::to_string(i);
        h = relu(conv2d(h, params.find(base + ".weight"), params.find(base + ".bias")));
    }
    NetOutput out;
    out.policy_logits = conv2d(h, params.find("policy.weight"), params.find("policy.bias"));
    out.log_probs = log_softmax_channels(out.policy_logits);
    out.value = conv2d(h, params.find("value.weight"), params.find("value.bias"));
    return out;
}

} // namespace relight::nn
