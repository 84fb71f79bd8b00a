#include "advmask/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "advmask/errors.hpp"

namespace advmask {

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

}  // namespace

double bilinear_clamp(const Image& img, double x, double y, int c) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    const int x0c = clampi(x0, 0, img.width - 1);
    const int x1c = clampi(x0 + 1, 0, img.width - 1);
    const int y0c = clampi(y0, 0, img.height - 1);
    const int y1c = clampi(y0 + 1, 0, img.height - 1);
    const double v00 = img.at(y0c, x0c, c);
    const double v01 = img.at(y0c, x1c, c);
    const double v10 = img.at(y1c, x0c, c);
    const double v11 = img.at(y1c, x1c, c);
    return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v01) +
           fy * ((1.0 - fx) * v10 + fx * v11);
}

double bilinear_zero(const Image& img, double x, double y, int c) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    auto sample = [&](int yy, int xx) -> double {
        if (yy < 0 || yy >= img.height || xx < 0 || xx >= img.width) return 0.0;
        return img.at(yy, xx, c);
    };
    return (1.0 - fy) * ((1.0 - fx) * sample(y0, x0) + fx * sample(y0, x0 + 1)) +
           fy * ((1.0 - fx) * sample(y0 + 1, x0) + fx * sample(y0 + 1, x0 + 1));
}

BilinearTaps bilinear_taps_clamp(const Image& img, double x, double y) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    BilinearTaps taps{};
    taps.y[0] = clampi(y0, 0, img.height - 1);
    taps.x[0] = clampi(x0, 0, img.width - 1);
    taps.w[0] = (1.0 - fy) * (1.0 - fx);
    taps.y[1] = clampi(y0, 0, img.height - 1);
    taps.x[1] = clampi(x0 + 1, 0, img.width - 1);
    taps.w[1] = (1.0 - fy) * fx;
    taps.y[2] = clampi(y0 + 1, 0, img.height - 1);
    taps.x[2] = clampi(x0, 0, img.width - 1);
    taps.w[2] = fy * (1.0 - fx);
    taps.y[3] = clampi(y0 + 1, 0, img.height - 1);
    taps.x[3] = clampi(x0 + 1, 0, img.width - 1);
    taps.w[3] = fy * fx;
    return taps;
}

std::uint8_t quantize_u8(double v) {
    const double scaled = clamp01(v) * 255.0;
    return static_cast<std::uint8_t>(std::lround(scaled));
}

double dequantize_u8(std::uint8_t v) { return static_cast<double>(v) / 255.0; }

Image quantized_copy(const Image& img) {
    Image out = img;
    for (double& v : out.data) v = dequantize_u8(quantize_u8(v));
    return out;
}

double max_abs_diff(const Image& a, const Image& b) {
    if (!a.same_shape(b)) {
        throw ShapeMismatch("max_abs_diff: images differ in shape");
    }
    double m = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        m = std::max(m, std::fabs(a.data[i] - b.data[i]));
    }
    return m;
}

std::uint64_t fnv1a64(const void* bytes, size_t n, std::uint64_t seed) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    std::uint64_t h = seed;
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::uint64_t content_hash(const Image& img) {
    std::vector<unsigned char> bytes;
    bytes.reserve(img.data.size() + 12);
    auto push_i32 = [&](int v) {
        for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
    };
    push_i32(img.height);
    push_i32(img.width);
    push_i32(img.channels);
    for (double v : img.data) bytes.push_back(quantize_u8(v));
    return fnv1a64(bytes.data(), bytes.size());
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace advmask
