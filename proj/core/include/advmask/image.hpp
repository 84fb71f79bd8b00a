#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace advmask {

/// Dense row-major H x W x C tensor of doubles. Used for facial images
/// (112x112x3 in [0,1]), mask textures, gradients and plot canvases.
struct Image {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    Image() = default;
    Image(int h, int w, int c, double fill = 0.0)
        : height(h), width(w), channels(c),
          data(static_cast<size_t>(h) * w * c, fill) {}

    double& at(int y, int x, int c) {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    double at(int y, int x, int c) const {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }

    size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }

    bool same_shape(const Image& other) const {
        return height == other.height && width == other.width &&
               channels == other.channels;
    }

    static Image zeros_like(const Image& other) {
        return Image(other.height, other.width, other.channels);
    }
};

/// 2D point in pixel coordinates (x = column, y = row).
struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline bool operator==(const Point2& a, const Point2& b) {
    return a.x == b.x && a.y == b.y;
}

/// Clamps v to [lo, hi].
inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

/// Bilinear sample of one channel with clamp-to-edge padding.
double bilinear_clamp(const Image& img, double x, double y, int c);

/// Bilinear sample of one channel treating everything outside the raster as 0.
double bilinear_zero(const Image& img, double x, double y, int c);

/// The four (y, x, weight) taps of a clamp-to-edge bilinear read at (x, y).
struct BilinearTaps {
    int y[4];
    int x[4];
    double w[4];
};
BilinearTaps bilinear_taps_clamp(const Image& img, double x, double y);

/// Quantizes [0,1] doubles to 8-bit and back; PNG round-trip semantics.
std::uint8_t quantize_u8(double v);
double dequantize_u8(std::uint8_t v);

/// Quantizes every sample in place (what a PNG save/load round trip does).
Image quantized_copy(const Image& img);

/// Max absolute difference between two same-shape images.
double max_abs_diff(const Image& a, const Image& b);

/// FNV-1a 64-bit hash of the 8-bit quantized pixel content. Stable key for
/// annotation assets that refer to images by content rather than by path.
std::uint64_t content_hash(const Image& img);

std::uint64_t fnv1a64(const void* bytes, size_t n, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64(const std::string& s);

/// Hex rendering of a 64-bit hash (16 lowercase digits).
std::string hash_hex(std::uint64_t h);

}  // namespace advmask
