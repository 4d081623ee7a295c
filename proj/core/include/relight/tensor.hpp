#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace relight::nn {

/// Dense row-major tensor of doubles. Shapes are small (rank <= 4 here) so
/// everything stays in plain vectors.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> v;

    Tensor() = default;
    explicit Tensor(std::vector<int> s);
    Tensor(std::vector<int> s, std::vector<double> values);

    std::size_t numel() const { return v.size(); }
    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    static Tensor zeros(std::vector<int> s) { return Tensor{std::move(s)}; }
    static Tensor full(std::vector<int> s, double fill);
};

std::size_t shape_numel(const std::vector<int>& shape);
std::string shape_to_string(const std::vector<int>& shape); // "3x32x32"
std::vector<int> shape_from_string(const std::string& text);

} // namespace relight::nn
