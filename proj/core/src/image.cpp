#include "relight/image.hpp"
#include "relight/errors.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

namespace relight {

ImageTensor::ImageTensor(int h, int w) : height(h), width(w) {
    if (h < 1 || w < 1)
        throw ShapeError("image dimensions must be at least 1x1, got " + std::to_string(h) + "x" +
                         std::to_string(w));
    data.assign(static_cast<std::size_t>(h) * w * 3, 0.0);
}

ImageTensor ImageTensor::filled(int h, int w, double value) {
    ImageTensor img(h, w);
    std::fill(img.data.begin(), img.data.end(), value);
    return img;
}

void validate(const ImageTensor& img) {
    if (img.height < 1 || img.width < 1) throw ShapeError("image dimensions must be at least 1x1");
    if (img.data.size() != img.pixel_count() * 3) throw ShapeError("image buffer size mismatch");
    for (double v : img.data) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw ShapeError("image element out of [0,1]: " + std::to_string(v));
    }
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

ImageTensor from_rgb8(int h, int w, const std::vector<unsigned char>& rgb) {
    ImageTensor img(h, w);
    const std::size_t n = img.pixel_count() * 3;
    for (std::size_t i = 0; i < n; ++i) img.data[i] = rgb[i] / 255.0;
    return img;
}

ImageTensor load_png(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("libpng read struct allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error("libpng info struct allocation failed");
    }

    std::vector<unsigned char> rgb;
    std::vector<png_bytep> rows;
    int h = 0, w = 0;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("not a valid PNG file: " + path.string());
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    const int bit_depth = png_get_bit_depth(png, info);
    if (bit_depth == 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("unsupported PNG bit depth 16 (only 8-bit is supported): " + path.string());
    }

    // Normalize everything 8-bit to plain RGB: expand palette and low-depth
    // gray, replicate gray to 3 channels, drop alpha.
    png_set_expand(png);
    png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    if (png_get_bit_depth(png, info) != 8 || png_get_channels(png, info) != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("unsupported PNG layout (expected 8-bit color): " + path.string());
    }

    w = static_cast<int>(png_get_image_width(png, info));
    h = static_cast<int>(png_get_image_height(png, info));
    rgb.resize(static_cast<std::size_t>(h) * w * 3);
    rows.resize(h);
    for (int y = 0; y < h; ++y) rows[y] = rgb.data() + static_cast<std::size_t>(y) * w * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    return from_rgb8(h, w, rgb);
}

int ppm_next_token(std::istream& in, std::string& tok) {
    tok.clear();
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') { // comment until end of line
            while ((ch = in.get()) != EOF && ch != '\n') {}
            continue;
        }
        if (!std::isspace(ch)) break;
    }
    if (ch == EOF) return -1;
    do {
        tok.push_back(static_cast<char>(ch));
    } while ((ch = in.get()) != EOF && !std::isspace(ch));
    return 0;
}

ImageTensor load_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());

    std::string tok;
    if (ppm_next_token(in, tok) < 0 || tok != "P6")
        throw FormatError("unsupported PPM variant '" + tok + "' (only binary P6): " + path.string());

    long w = 0, h = 0, maxval = 0;
    try {
        if (ppm_next_token(in, tok) < 0) throw FormatError("");
        w = std::stol(tok);
        if (ppm_next_token(in, tok) < 0) throw FormatError("");
        h = std::stol(tok);
        if (ppm_next_token(in, tok) < 0) throw FormatError("");
        maxval = std::stol(tok);
    } catch (const std::exception&) {
        throw FormatError("malformed PPM header: " + path.string());
    }
    if (w < 1 || h < 1) throw FormatError("bad PPM dimensions: " + path.string());
    if (maxval != 255)
        throw FormatError("unsupported PPM maxval " + std::to_string(maxval) +
                          " (only 8-bit, maxval 255): " + path.string());

    std::vector<unsigned char> rgb(static_cast<std::size_t>(h) * w * 3);
    in.read(reinterpret_cast<char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    if (in.gcount() != static_cast<std::streamsize>(rgb.size()))
        throw FormatError("truncated PPM pixel data: " + path.string());

    return from_rgb8(static_cast<int>(h), static_cast<int>(w), rgb);
}

bool has_png_signature(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    unsigned char sig[8] = {};
    in.read(reinterpret_cast<char*>(sig), 8);
    static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    return in.gcount() == 8 && std::memcmp(sig, png_sig, 8) == 0;
}

} // namespace

ImageTensor load_image(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
    ImageTensor img = has_png_signature(path) ? load_png(path) : load_ppm(path);
    validate(img);
    return img;
}

void save_image(const ImageTensor& img, const std::filesystem::path& path) {
    validate(img);

    std::vector<unsigned char> rgb(img.pixel_count() * 3);
    for (std::size_t i = 0; i < rgb.size(); ++i) {
        double q = std::round(img.data[i] * 255.0);
        rgb[i] = static_cast<unsigned char>(std::clamp(q, 0.0, 255.0));
    }

    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw IoError("cannot write " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("libpng write struct allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("libpng info struct allocation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG write failed: " + path.string());
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height),
                 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < img.height; ++y)
        png_write_row(png, rgb.data() + static_cast<std::size_t>(y) * img.width * 3);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

ImageTensor resize_bilinear(const ImageTensor& img, int out_h, int out_w) {
    if (out_h < 1 || out_w < 1) throw ShapeError("resize target must be at least 1x1");
    ImageTensor out(out_h, out_w);

    const double sy = static_cast<double>(img.height) / out_h;
    const double sx = static_cast<double>(img.width) / out_w;

    for (int y = 0; y < out_h; ++y) {
        // half-pixel centers: output center maps to (y + 0.5) * scale - 0.5
        double fy = (y + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
        const int y0 = static_cast<int>(std::floor(fy));
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double wy = fy - y0;
        for (int x = 0; x < out_w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
            const int x0 = static_cast<int>(std::floor(fx));
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double wx = fx - x0;
            for (int c = 0; c < 3; ++c) {
                const double top = img.at(y0, x0, c) * (1.0 - wx) + img.at(y0, x1, c) * wx;
                const double bot = img.at(y1, x0, c) * (1.0 - wx) + img.at(y1, x1, c) * wx;
                out.at(y, x, c) = std::clamp(top * (1.0 - wy) + bot * wy, 0.0, 1.0);
            }
        }
    }
    return out;
}

ImageTensor synth_darken(const ImageTensor& img, double gamma, double scale) {
    if (!(gamma > 0.0)) throw ConfigError("synth_darken gamma must be positive");
    if (!(scale > 0.0) || scale > 1.0) throw ConfigError("synth_darken scale must be in (0,1]");
    ImageTensor out(img.height, img.width);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        out.data[i] = std::clamp(scale * std::pow(img.data[i], gamma), 0.0, 1.0);
    return out;
}

double mean_luminance(const ImageTensor& img) {
    double sum = 0.0;
    for (double v : img.data) sum += v;
    return sum / static_cast<double>(img.data.size());
}

} // namespace relight
