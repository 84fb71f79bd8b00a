#include "advmask/augmentation.hpp"

#include "advmask/errors.hpp"

namespace advmask {

void AugmentationConfig::validate() const {
    auto check = [](double lo, double hi, const char* what) {
        if (!(lo <= hi)) throw InvalidConfig(std::string("inverted augmentation range: ") + what);
    };
    check(translation_min, translation_max, "translation");
    check(rotation_min_deg, rotation_max_deg, "rotation");
    check(contrast_min, contrast_max, "contrast");
    check(brightness_min, brightness_max, "brightness");
    check(noise_sigma_min, noise_sigma_max, "noise_sigma");
    if (noise_sigma_min < 0.0) throw InvalidConfig("noise sigma must be non-negative");
    if (contrast_min < 0.0) throw InvalidConfig("contrast gain must be non-negative");
}

AugmentationConfig AugmentationConfig::identity() {
    AugmentationConfig cfg;
    cfg.translation_min = cfg.translation_max = 0.0;
    cfg.rotation_min_deg = cfg.rotation_max_deg = 0.0;
    cfg.contrast_min = cfg.contrast_max = 1.0;
    cfg.brightness_min = cfg.brightness_max = 0.0;
    cfg.noise_sigma_min = cfg.noise_sigma_max = 0.0;
    return cfg;
}

AugmentationParams sample_augmentation(Rng& rng, const AugmentationConfig& config) {
    config.validate();
    AugmentationParams params;
    params.translate_x = rng.uniform(config.translation_min, config.translation_max);
    params.translate_y = rng.uniform(config.translation_min, config.translation_max);
    params.rotation_deg = rng.uniform(config.rotation_min_deg, config.rotation_max_deg);
    params.contrast = rng.uniform(config.contrast_min, config.contrast_max);
    params.brightness = rng.uniform(config.brightness_min, config.brightness_max);
    params.noise_sigma = rng.uniform(config.noise_sigma_min, config.noise_sigma_max);
    params.noise_seed = rng.next_u64();
    return params;
}

}  // namespace advmask
