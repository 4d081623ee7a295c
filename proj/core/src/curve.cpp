#include "relight/curve.hpp"
#include "relight/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

namespace relight {

ActionSpace ActionSpace::make(double lo, double hi, double graduation) {
    if (!(lo < hi)) throw ConfigError("action space needs lo < hi");
    if (!(graduation > 0.0)) throw ConfigError("action space graduation must be positive");
    const double steps = (hi - lo) / graduation;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, std::abs(steps)))
        throw ConfigError("(hi - lo) is not a multiple of the graduation");

    ActionSpace s;
    s.lo = lo;
    s.hi = hi;
    s.graduation = graduation;
    const int n = static_cast<int>(rounded) + 1;
    if (n > 256) throw ConfigError("action space too large for 8-bit indices: " + std::to_string(n));
    s.values.resize(n);
    for (int i = 0; i < n; ++i) s.values[i] = lo + graduation * i;
    s.values.back() = hi; // pin the endpoint against accumulation error
    return s;
}

ActionSpace ActionSpace::wide() { return make(-0.5, 1.0, 1.0 / 18.0); }
ActionSpace ActionSpace::baseline() { return make(-0.3, 1.0, 0.05); }

int quantize(const ActionSpace& space, double raw) {
    const int last = space.count() - 1;
    if (raw <= space.lo) return 0;
    if (raw >= space.hi) return last;
    const double u = (raw - space.lo) / space.graduation;
    int k = static_cast<int>(std::floor(u));
    const double frac = u - k;
    if (frac > 0.5) ++k; // exact midpoint stays at the lower index
    return std::clamp(k, 0, last);
}

ActionMap::ActionMap(ActionSpace s, int h, int w) : space(std::move(s)), height(h), width(w) {
    if (h < 1 || w < 1) throw ShapeError("action map dimensions must be at least 1x1");
    indices.assign(static_cast<std::size_t>(h) * w, 0);
}

ActionMap ActionMap::constant(const ActionSpace& s, int h, int w, int index) {
    if (index < 0 || index >= s.count()) throw ShapeError("action index out of range");
    ActionMap m(s, h, w);
    std::fill(m.indices.begin(), m.indices.end(), static_cast<std::uint8_t>(index));
    return m;
}

namespace {
constexpr char kMapMagic[4] = {'R', 'A', 'M', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}
} // namespace

void write_action_map(const ActionMap& map, std::ostream& out) {
    out.write(kMapMagic, 4);
    write_u32(out, static_cast<std::uint32_t>(map.height));
    write_u32(out, static_cast<std::uint32_t>(map.width));
    out.write(reinterpret_cast<const char*>(map.indices.data()),
              static_cast<std::streamsize>(map.indices.size()));
    if (!out) throw IoError("action map write failed");
}

ActionMap read_action_map(std::istream& in, const ActionSpace& space) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMapMagic, 4) != 0) throw FormatError("bad action map header");
    const std::uint32_t h = read_u32(in);
    const std::uint32_t w = read_u32(in);
    if (!in || h < 1 || w < 1 || h > (1u << 20) || w > (1u << 20))
        throw FormatError("bad action map dimensions");
    ActionMap map(space, static_cast<int>(h), static_cast<int>(w));
    in.read(reinterpret_cast<char*>(map.indices.data()), static_cast<std::streamsize>(map.indices.size()));
    if (in.gcount() != static_cast<std::streamsize>(map.indices.size()))
        throw FormatError("truncated action map");
    for (std::uint8_t idx : map.indices)
        if (idx >= space.count()) throw FormatError("action map index out of range for this space");
    return map;
}

namespace {
inline double curve_step(double s, double a) {
    // clamp shaves the sub-ulp overshoot the exact formula can pick up in
    // floating point near s = 1
    return std::clamp(s + a * s * (1.0 - s), 0.0, 1.0);
}
} // namespace

ImageTensor apply_curve(const ImageTensor& s, const ActionMap& a) {
    if (s.height != a.height || s.width != a.width)
        throw ShapeError("action map " + std::to_string(a.height) + "x" + std::to_string(a.width) +
                         " does not match image " + std::to_string(s.height) + "x" +
                         std::to_string(s.width));
    for (double v : a.space.values)
        if (v < -0.5 || v > 1.0)
            throw ShapeError("curve coefficient " + std::to_string(v) +
                             " outside [-0.5, 1] would break the output range");

    ImageTensor out(s.height, s.width);
    for (int y = 0; y < s.height; ++y) {
        for (int x = 0; x < s.width; ++x) {
            const double c = a.coeff_at(y, x);
            for (int ch = 0; ch < 3; ++ch) out.at(y, x, ch) = curve_step(s.at(y, x, ch), c);
        }
    }
    return out;
}

std::vector<ImageTensor> rollout_curves(const ImageTensor& s0, std::span<const ActionMap> maps) {
    std::vector<ImageTensor> states;
    states.reserve(maps.size());
    const ImageTensor* cur = &s0;
    for (const ActionMap& m : maps) {
        states.push_back(apply_curve(*cur, m));
        cur = &states.back();
    }
    return states;
}

Envelope envelope_at(const ActionSpace& space, int n, double s) {
    double up = s, dn = s;
    for (int i = 0; i < n; ++i) {
        up = curve_step(up, space.hi);
        dn = curve_step(dn, space.lo);
    }
    return {up, dn};
}

double coverage_range(const ActionSpace& space, int n, long grid) {
    if (n < 1) throw ConfigError("coverage needs n >= 1");
    if (grid < 1000) throw ConfigError("coverage needs at least 1000 grid samples");
    double acc = 0.0;
    for (long i = 0; i < grid; ++i) {
        const double s = (i + 0.5) / static_cast<double>(grid); // midpoint rule
        const Envelope e = envelope_at(space, n, s);
        acc += e.upper - e.lower;
    }
    return acc / static_cast<double>(grid);
}

} // namespace relight
