#include "relight/tensor.hpp"

#include "relight/errors.hpp"

#include <sstream>

namespace relight::nn {

std::size_t shape_numel(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) {
        if (d <= 0) throw ShapeError{"tensor dimension must be positive, got " + std::to_string(d)};
        n *= static_cast<std::size_t>(d);
    }
    return n;
}

Tensor::Tensor(std::vector<int> s) : shape(std::move(s)), v(shape_numel(shape), 0.0) {}

Tensor::Tensor(std::vector<int> s, std::vector<double> values)
    : shape(std::move(s)), v(std::move(values)) {
    if (v.size() != shape_numel(shape))
        throw ShapeError{"tensor data length " + std::to_string(v.size()) +
                         " does not match shape " + shape_to_string(shape)};
}

Tensor Tensor::full(std::vector<int> s, double fill) {
    Tensor t{std::move(s)};
    for (double& x : t.v) x = fill;
    return t;
}

std::string shape_to_string(const std::vector<int>& shape) {
    std::string out;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) out += 'x';
        out += std::to_string(shape[i]);
    }
    return out;
}

std::vector<int> shape_from_string(const std::string& text) {
    std::vector<int> shape;
    std::stringstream ss{text};
    std::string part;
    while (std::getline(ss, part, 'x')) {
        try {
            shape.push_back(std::stoi(part));
        } catch (const std::exception&) {
            throw FormatError{"bad shape string: " + text};
        }
    }
    if (shape.empty()) throw FormatError{"empty shape string"};
    shape_numel(shape); // validates positivity
    return shape;
}

} // namespace relight::nn
