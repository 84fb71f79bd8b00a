#pragma once

#include <string>
#include <utility>
#include <vector>

#include "advmask/face.hpp"
#include "advmask/mask_texture.hpp"
#include "advmask/render.hpp"
#include "advmask/rng.hpp"

namespace advmask {

/// Mask-substitution preprocessing: re-render a standard texture over the
/// canonical lower-face support, hiding whatever occluder is worn.
struct SanitizationPolicy {
    MaskTexture replacement;  // default: standard blue
    enum class ApplyWhen { always, mask_detected } apply_when = ApplyWhen::always;

    static SanitizationPolicy standard_blue();
};

/// Renders the policy's replacement texture with identity augmentation over
/// the face's support region. Idempotent within the support. The
/// mask_detected policy requires a mask-presence classifier, which this
/// toolkit does not ship; selecting it throws InvalidConfig.
Image substitute_mask(const Image& image, const std::vector<Point2>& landmarks,
                      const SanitizationPolicy& policy, const RenderContext& ctx);

struct AdvTrainingItem {
    std::string source_path;
    std::string output_path;
    std::string mask_name;  // "none" for the passthrough original
    std::string identity;
    std::uint64_t seed = 0;
};

struct AdvTrainingManifest {
    std::vector<AdvTrainingItem> items;
    std::vector<std::string> failures;  // human-readable skip records

    void write_csv(const std::string& path) const;
};

/// Emits, for every source image, the original plus one rendered copy per
/// mask into out_dir, and returns the provenance manifest. Per-item render
/// failures are recorded in `failures` and skipped.
AdvTrainingManifest generate_adv_training_set(
    const std::vector<FaceSample>& dataset,
    const std::vector<std::pair<std::string, MaskTexture>>& masks, Rng& rng,
    const RenderContext& ctx, const std::string& out_dir);

}  // namespace advmask
