#include "advmask/mask_texture.hpp"

#include <cmath>

#include "advmask/errors.hpp"
#include "advmask/png_io.hpp"

namespace advmask {

void MaskTexture::validate() const {
    if (pixels.channels != 3) throw ShapeMismatch("mask texture must have 3 channels");
    if (support.channels != 1) throw ShapeMismatch("mask support must have 1 channel");
    if (pixels.height != support.height || pixels.width != support.width) {
        throw ShapeMismatch("mask texture and support differ in size");
    }
    if (pixels.height <= 0 || pixels.width <= 0) {
        throw InvalidConfig("mask texture has empty dimensions");
    }
    for (double v : pixels.data) {
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidConfig("mask pixel outside [0,1]");
    }
    for (double v : support.data) {
        if (v != 0.0 && v != 1.0) throw InvalidConfig("mask support must be binary");
    }
}

void MaskTexture::clamp_pixels() {
    for (double& v : pixels.data) v = clamp01(v);
}

bool MaskTexture::support_empty() const {
    for (double v : support.data) {
        if (v != 0.0) return false;
    }
    return true;
}

Image default_mask_support(int height, int width) {
    Image support(height, width, 1);
    // Superellipse centered above the canvas midline: full width near the
    // top (nose bridge / cheeks), curving in toward the chin at the bottom.
    const double cx = (width - 1) * 0.5;
    const double cy = height * 0.30;
    const double a = width * 0.485;
    const double b = height * 0.72;
    const double p = 2.6;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double nx = std::fabs((x - cx) / a);
            const double ny = std::fabs((y - cy) / b);
            const double d = std::pow(nx, p) + std::pow(ny, p);
            support.at(y, x, 0) = d <= 1.0 ? 1.0 : 0.0;
        }
    }
    return support;
}

MaskTexture make_uniform_mask(double r, double g, double b, Image support) {
    MaskTexture mask;
    mask.pixels = Image(support.height, support.width, 3);
    for (int y = 0; y < support.height; ++y) {
        for (int x = 0; x < support.width; ++x) {
            mask.pixels.at(y, x, 0) = r;
            mask.pixels.at(y, x, 1) = g;
            mask.pixels.at(y, x, 2) = b;
        }
    }
    mask.support = std::move(support);
    return mask;
}

MaskTexture standard_mask(StandardMaskColor color, const Image& support) {
    switch (color) {
        case StandardMaskColor::blue:
            return make_uniform_mask(0.30, 0.52, 0.71, support);
        case StandardMaskColor::black:
            return make_uniform_mask(0.05, 0.05, 0.05, support);
        case StandardMaskColor::white:
        default:
            return make_uniform_mask(0.95, 0.95, 0.95, support);
    }
}

MaskTexture standard_mask(StandardMaskColor color) {
    return standard_mask(color, default_mask_support());
}

const char* standard_mask_name(StandardMaskColor color) {
    switch (color) {
        case StandardMaskColor::blue: return "blue";
        case StandardMaskColor::black: return "black";
        case StandardMaskColor::white:
        default: return "white";
    }
}

MaskTexture random_mask(Rng& rng, const Image& support) {
    MaskTexture mask;
    mask.pixels = Image(support.height, support.width, 3);
    for (double& v : mask.pixels.data) v = rng.uniform();
    mask.support = support;
    return mask;
}

MaskTexture white_mask(const Image& support) {
    return make_uniform_mask(1.0, 1.0, 1.0, support);
}

MaskTexture face_control_mask(bool male, const Image& support) {
    MaskTexture mask;
    const int h = support.height;
    const int w = support.width;
    mask.pixels = Image(h, w, 3);
    // Skin base with a nose highlight, nostril shadows, lips and (for the
    // male variant) stubble shading. Purely procedural lower-face look-alike.
    const double skin_r = male ? 0.72 : 0.82;
    const double skin_g = male ? 0.55 : 0.64;
    const double skin_b = male ? 0.42 : 0.52;
    const double cx = (w - 1) * 0.5;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double r = skin_r, g = skin_g, b = skin_b;
            const double dx = (x - cx) / (0.5 * w);
            // Cheek falloff.
            const double shade = 1.0 - 0.18 * dx * dx;
            r *= shade; g *= shade; b *= shade;
            // Nose ridge highlight near the top center.
            const double nose = std::exp(-(dx * dx) / 0.02 - std::pow((y - 0.12 * h) / (0.25 * h), 2.0));
            r = clamp01(r + 0.10 * nose);
            g = clamp01(g + 0.08 * nose);
            b = clamp01(b + 0.06 * nose);
            // Nostrils.
            const double ny = (y - 0.32 * h) / (0.06 * h);
            const double nl = std::exp(-std::pow((x - cx + 0.09 * w) / (0.025 * w), 2.0) - ny * ny);
            const double nr = std::exp(-std::pow((x - cx - 0.09 * w) / (0.025 * w), 2.0) - ny * ny);
            const double nostril = 0.5 * (nl + nr);
            r = clamp01(r - 0.35 * nostril);
            g = clamp01(g - 0.30 * nostril);
            b = clamp01(b - 0.25 * nostril);
            // Lips.
            const double ly = (y - 0.62 * h) / (0.10 * h);
            const double lips = std::exp(-std::pow(dx / 0.42, 4.0) - ly * ly);
            r = clamp01(r + 0.12 * lips);
            g = clamp01(g - 0.12 * lips);
            b = clamp01(b - 0.08 * lips);
            if (male) {
                // Stubble: deterministic high-frequency darkening on the chin.
                const double grain = 0.5 + 0.5 * std::sin(x * 1.7 + y * 2.3) * std::sin(x * 0.9 - y * 1.1);
                const double chin = y > 0.45 * h ? 1.0 : 0.0;
                const double s = 0.10 * grain * chin;
                r = clamp01(r - s); g = clamp01(g - s); b = clamp01(b - s);
            }
            mask.pixels.at(y, x, 0) = r;
            mask.pixels.at(y, x, 1) = g;
            mask.pixels.at(y, x, 2) = b;
        }
    }
    mask.support = support;
    return mask;
}

void save_mask_texture(const MaskTexture& mask, const std::string& texture_png,
                       const std::string& support_png) {
    write_png_rgb(texture_png, mask.pixels);
    write_png_gray(support_png, mask.support);
}

MaskTexture load_mask_texture(const std::string& texture_png,
                              const std::string& support_png) {
    MaskTexture mask;
    mask.pixels = read_png(texture_png);
    Image raw = read_png(support_png);
    if (raw.channels != 1) throw IoError("support PNG must be grayscale: " + support_png);
    // Binarize: anything at or above half intensity counts as fabric.
    mask.support = Image(raw.height, raw.width, 1);
    for (size_t i = 0; i < raw.data.size(); ++i) {
        mask.support.data[i] = raw.data[i] >= 0.5 ? 1.0 : 0.0;
    }
    mask.validate();
    return mask;
}

}  // namespace advmask
