#pragma once

#include <cstdint>

#include "advmask/rng.hpp"

namespace advmask {

/// Ranges for the randomized placement/appearance transformations applied to
/// the mask during rendering. Geometric ranges are in texture pixel units and
/// degrees; color ranges are gain/bias on [0,1] intensities.
struct AugmentationConfig {
    double translation_min = -4.0;
    double translation_max = 4.0;
    double rotation_min_deg = -8.0;
    double rotation_max_deg = 8.0;
    double contrast_min = 0.9;
    double contrast_max = 1.1;
    double brightness_min = -0.05;
    double brightness_max = 0.05;
    double noise_sigma_min = 0.0;
    double noise_sigma_max = 0.02;

    void validate() const;

    /// All ranges collapsed to identity values (no augmentation).
    static AugmentationConfig identity();
};

/// One concrete draw of the transformation parameters.
struct AugmentationParams {
    double translate_x = 0.0;
    double translate_y = 0.0;
    double rotation_deg = 0.0;
    double contrast = 1.0;
    double brightness = 0.0;
    double noise_sigma = 0.0;
    std::uint64_t noise_seed = 0;

    static AugmentationParams identity() { return AugmentationParams{}; }
};

/// Pure function of (rng state, config); throws InvalidConfig on inverted
/// ranges. Consumes a fixed number of draws regardless of configuration.
AugmentationParams sample_augmentation(Rng& rng, const AugmentationConfig& config);

}  // namespace advmask
