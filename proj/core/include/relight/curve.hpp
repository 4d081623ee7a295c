#pragma once

#include "relight/image.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace relight {

/// Quantized set of legal curve coefficients: lo, lo+graduation, ..., hi.
/// (hi - lo) must be an integer multiple of the graduation.
struct ActionSpace {
    double lo = 0.0;
    double hi = 0.0;
    double graduation = 0.0;
    std::vector<double> values;

    static ActionSpace make(double lo, double hi, double graduation);

    /// [-0.5, 1] in steps of 1/18 -> 28 coefficients.
    static ActionSpace wide();
    /// [-0.3, 1] in steps of 0.05 -> 27 coefficients.
    static ActionSpace baseline();

    int count() const { return static_cast<int>(values.size()); }

    bool operator==(const ActionSpace& o) const {
        return lo == o.lo && hi == o.hi && graduation == o.graduation;
    }
};

/// Index of the value nearest to raw, ties broken toward the lower index.
/// Out-of-range inputs clamp to the first/last index.
int quantize(const ActionSpace& space, double raw);

/// Per-pixel curve coefficients for one enhancement step, stored as indices
/// into an ActionSpace so serialized maps are exact.
struct ActionMap {
    ActionSpace space;
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> indices; // row-major, height * width

    ActionMap() = default;
    ActionMap(ActionSpace s, int h, int w);

    /// Map where every pixel uses the same action index.
    static ActionMap constant(const ActionSpace& s, int h, int w, int index);

    std::uint8_t index_at(int y, int x) const { return indices[static_cast<std::size_t>(y) * width + x]; }
    void set_index(int y, int x, int idx) { indices[static_cast<std::size_t>(y) * width + x] = static_cast<std::uint8_t>(idx); }
    double coeff_at(int y, int x) const { return space.values[index_at(y, x)]; }
};

/// Binary container: magic, dimensions header, then the row-major 8-bit
/// index array.
void write_action_map(const ActionMap& map, std::ostream& out);
ActionMap read_action_map(std::istream& in, const ActionSpace& space);

/// One enhancement step: out(x) = s(x) + a(x) * s(x) * (1 - s(x)), the same
/// coefficient applied to all three channels of pixel x. Coefficients must
/// lie in [-0.5, 1], which keeps the output inside [0, 1] and the curve
/// monotone in s.
ImageTensor apply_curve(const ImageTensor& s, const ActionMap& a);

/// Iterated steps: returns the n intermediate states s^1..s^n.
std::vector<ImageTensor> rollout_curves(const ImageTensor& s0, std::span<const ActionMap> maps);

/// Mean width of the band reachable after n steps: sample s uniformly on
/// [0, 1] and average f_max^n(s) - f_min^n(s), where f_max/f_min apply the
/// largest/smallest coefficient of the space. Because the curve is monotone
/// in s for all legal coefficients, these iterates bound everything any
/// action sequence can reach.
double coverage_range(const ActionSpace& space, int n, long grid = 100000);

/// Sampled n-step envelope at s: {upper, lower}.
struct Envelope {
    double upper;
    double lower;
};
Envelope envelope_at(const ActionSpace& space, int n, double s);

} // namespace relight
