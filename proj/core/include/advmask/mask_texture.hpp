#pragma once

#include <string>

#include "advmask/image.hpp"
#include "advmask/rng.hpp"

namespace advmask {

/// The optimizable occluder: an RGB texture plus a binary support region.
/// Only `pixels` changes during optimization; `support` is fixed.
struct MaskTexture {
    Image pixels;   // height x width x 3, values in [0,1]
    Image support;  // height x width x 1, values exactly 0 or 1

    int height() const { return pixels.height; }
    int width() const { return pixels.width; }

    /// Throws ShapeMismatch / InvalidConfig when the invariants are broken.
    void validate() const;

    /// Projects pixels back into [0,1] (used after every optimizer step).
    void clamp_pixels();

    bool support_empty() const;
};

/// Default texture dimensions (height 60, width 112).
inline constexpr int kDefaultMaskHeight = 60;
inline constexpr int kDefaultMaskWidth = 112;

/// Built-in face-mask silhouette: rounded top, curved chin line. Serves as
/// the default support template; user-supplied PNG templates replace it.
Image default_mask_support(int height = kDefaultMaskHeight, int width = kDefaultMaskWidth);

MaskTexture make_uniform_mask(double r, double g, double b, Image support);

/// Standard disposable masks used for gallery augmentation and as controls.
enum class StandardMaskColor { blue, black, white };
MaskTexture standard_mask(StandardMaskColor color, const Image& support);
MaskTexture standard_mask(StandardMaskColor color);
const char* standard_mask_name(StandardMaskColor color);

/// Uniformly random pixels over the given support (the "random" control).
MaskTexture random_mask(Rng& rng, const Image& support);

/// White-initialized mask, the optimizer's starting point.
MaskTexture white_mask(const Image& support);

/// Procedural lower-face textures used as the male/female face controls.
MaskTexture face_control_mask(bool male, const Image& support);

/// Lossless PNG persistence: 8-bit RGB texture + 8-bit grayscale support.
void save_mask_texture(const MaskTexture& mask, const std::string& texture_png,
                       const std::string& support_png);
MaskTexture load_mask_texture(const std::string& texture_png,
                              const std::string& support_png);

}  // namespace advmask
