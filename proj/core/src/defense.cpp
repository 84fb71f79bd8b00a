#include "advmask/defense.hpp"

#include <filesystem>
#include <fstream>

#include "advmask/errors.hpp"
#include "advmask/png_io.hpp"

namespace advmask {

SanitizationPolicy SanitizationPolicy::standard_blue() {
    SanitizationPolicy policy;
    policy.replacement = standard_mask(StandardMaskColor::blue);
    return policy;
}

Image substitute_mask(const Image& image, const std::vector<Point2>& landmarks,
                      const SanitizationPolicy& policy, const RenderContext& ctx) {
    if (policy.apply_when == SanitizationPolicy::ApplyWhen::mask_detected) {
        throw InvalidConfig(
            "apply_when=mask_detected needs a mask-presence classifier, which is not provided; "
            "use apply_when=always");
    }
    policy.replacement.validate();
    FaceSample face;
    face.image = image;
    face.landmarks = landmarks;
    face.identity = "-";
    return render_with(ctx, policy.replacement, face, AugmentationParams::identity());
}

void AdvTrainingManifest::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest csv: " + path);
    out << "source_path,output_path,mask_name,identity,seed\n";
    for (const AdvTrainingItem& item : items) {
        out << item.source_path << "," << item.output_path << "," << item.mask_name << ","
            << item.identity << "," << item.seed << "\n";
    }
}

AdvTrainingManifest generate_adv_training_set(
    const std::vector<FaceSample>& dataset,
    const std::vector<std::pair<std::string, MaskTexture>>& masks, Rng& rng,
    const RenderContext& ctx, const std::string& out_dir) {
    if (masks.empty()) throw InvalidConfig("generate_adv_training_set: no masks listed");
    std::filesystem::create_directories(out_dir);

    AdvTrainingManifest manifest;
    for (size_t i = 0; i < dataset.size(); ++i) {
        const FaceSample& face = dataset[i];
        const std::string stem = face.identity + "_" + std::to_string(i);

        const std::string original_path =
            (std::filesystem::path(out_dir) / (stem + "_none.png")).string();
        write_png_rgb(original_path, face.image);
        manifest.items.push_back({face.source_path, original_path, "none", face.identity, 0});

        for (const auto& [mask_name, texture] : masks) {
            const std::uint64_t item_seed = rng.next_u64();
            const std::string out_path =
                (std::filesystem::path(out_dir) / (stem + "_" + mask_name + ".png")).string();
            try {
                Rng item_rng(item_seed);
                const AugmentationParams params = sample_augmentation(item_rng, ctx.augmentation);
                const Image rendered = render_with(ctx, texture, face, params);
                write_png_rgb(out_path, rendered);
                manifest.items.push_back(
                    {face.source_path, out_path, mask_name, face.identity, item_seed});
            } catch (const Error& e) {
                manifest.failures.push_back(stem + "/" + mask_name + ": " + e.what());
            }
        }
    }
    return manifest;
}

}  // namespace advmask
