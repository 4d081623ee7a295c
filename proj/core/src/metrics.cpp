#include "relight/metrics.hpp"

#include "relight/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace relight {

double psnr(const ImageTensor& a, const ImageTensor& b) {
    if (!a.same_shape(b)) throw ShapeError{"psnr: image dimensions differ"};
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        acc += d * d;
    }
    const double mse = acc / static_cast<double>(a.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

namespace {

constexpr int kWin = 11;
constexpr int kRadius = kWin / 2;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::array<double, kWin> gaussian_taps() {
    std::array<double, kWin> taps{};
    double sum = 0.0;
    for (int i = 0; i < kWin; ++i) {
        const double x = static_cast<double>(i - kRadius);
        taps[static_cast<std::size_t>(i)] = std::exp(-0.5 * x * x / (kSigma * kSigma));
        sum += taps[static_cast<std::size_t>(i)];
    }
    for (double& t : taps) t /= sum;
    return taps;
}

// Weighted window sum of a single-channel plane at center (cy, cx).
struct WindowMoments {
    double m1, m2, s11, s22, s12;
};

} // namespace

double ssim(const ImageTensor& a, const ImageTensor& b) {
    if (!a.same_shape(b)) throw ShapeError{"ssim: image dimensions differ"};
    if (a.height < kWin || a.width < kWin)
        throw ShapeError{"ssim: image smaller than the 11x11 window"};
    static const std::array<double, kWin> taps = gaussian_taps();

    const int h = a.height;
    const int w = a.width;
    double channel_acc = 0.0;
    std::vector<double> row_a(static_cast<std::size_t>(kWin) * w);
    std::vector<double> row_b(row_a.size());
    std::vector<double> row_aa(row_a.size());
    std::vector<double> row_bb(row_a.size());
    std::vector<double> row_ab(row_a.size());

    for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        std::size_t count = 0;
        for (int cy = kRadius; cy < h - kRadius; ++cy) {
            // vertical pass over the kWin rows feeding this center row
            for (int x = 0; x < w; ++x) {
                double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
                for (int k = 0; k < kWin; ++k) {
                    const double va = a.at(cy + k - kRadius, x, c);
                    const double vb = b.at(cy + k - kRadius, x, c);
                    const double t = taps[static_cast<std::size_t>(k)];
                    sa += t * va;
                    sb += t * vb;
                    saa += t * va * va;
                    sbb += t * vb * vb;
                    sab += t * va * vb;
                }
                row_a[static_cast<std::size_t>(x)] = sa;
                row_b[static_cast<std::size_t>(x)] = sb;
                row_aa[static_cast<std::size_t>(x)] = saa;
                row_bb[static_cast<std::size_t>(x)] = sbb;
                row_ab[static_cast<std::size_t>(x)] = sab;
            }
            for (int cx = kRadius; cx < w - kRadius; ++cx) {
                WindowMoments m{0, 0, 0, 0, 0};
                for (int k = 0; k < kWin; ++k) {
                    const double t = taps[static_cast<std::size_t>(k)];
                    const std::size_t x = static_cast<std::size_t>(cx + k - kRadius);
                    m.m1 += t * row_a[x];
                    m.m2 += t * row_b[x];
                    m.s11 += t * row_aa[x];
                    m.s22 += t * row_bb[x];
                    m.s12 += t * row_ab[x];
                }
                const double mu1 = m.m1, mu2 = m.m2;
                const double v1 = m.s11 - mu1 * mu1;
                const double v2 = m.s22 - mu2 * mu2;
                const double cov = m.s12 - mu1 * mu2;
                const double num = (2.0 * mu1 * mu2 + kC1) * (2.0 * cov + kC2);
                const double den = (mu1 * mu1 + mu2 * mu2 + kC1) * (v1 + v2 + kC2);
                acc += num / den;
                ++count;
            }
        }
        channel_acc += acc / static_cast<double>(count);
    }
    return channel_acc / 3.0;
}

} // namespace relight
