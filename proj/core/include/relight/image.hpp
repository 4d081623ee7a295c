#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

namespace relight {

/// H x W x 3 image, interleaved RGB, every channel normalized to [0, 1].
/// This is the only internal pixel representation; 8-bit files are converted
/// on load and quantized back on save. Instances are immutable by convention
/// once filled, so they can be shared across worker threads freely.
struct ImageTensor {
    int height = 0;
    int width = 0;
    std::vector<double> data; // height * width * 3, row-major, R,G,B

    ImageTensor() = default;
    ImageTensor(int h, int w);

    static ImageTensor filled(int h, int w, double value);

    double& at(int y, int x, int c) { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
    double at(int y, int x, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }

    std::size_t pixel_count() const { return static_cast<std::size_t>(height) * width; }
    bool same_shape(const ImageTensor& other) const {
        return height == other.height && width == other.width;
    }
};

/// Throws ShapeError when dimensions or value range are violated.
void validate(const ImageTensor& img);

/// Reads an 8-bit PNG (gray, gray+alpha, palette, RGB or RGBA) or a binary
/// PPM (P6, maxval 255). Grayscale is replicated to 3 channels, alpha is
/// dropped. 16-bit files are rejected with FormatError naming the format.
ImageTensor load_image(const std::filesystem::path& path);

/// Writes an 8-bit RGB PNG. Quantization is round(v * 255) clamped to
/// [0, 255], so a save/load round trip moves a channel by at most 1/510.
void save_image(const ImageTensor& img, const std::filesystem::path& path);

/// Bilinear resize with half-pixel centers (aligned-corners off).
/// Constant images map to constant images exactly.
ImageTensor resize_bilinear(const ImageTensor& img, int out_h, int out_w);

/// Synthetic low-light degradation: scale * img^gamma, elementwise.
/// gamma > 0, scale in (0, 1].
ImageTensor synth_darken(const ImageTensor& img, double gamma, double scale);

/// Mean over all pixels of the per-pixel channel mean.
double mean_luminance(const ImageTensor& img);

} // namespace relight
