#include "advmask/gallery.hpp"

#include <cstring>
#include <fstream>

#include "advmask/errors.hpp"

namespace advmask {

const char* gallery_mode_name(GalleryMode mode) {
    return mode == GalleryMode::plain ? "plain" : "mask_augmented";
}

GalleryMode gallery_mode_from_name(const std::string& name) {
    if (name == "plain") return GalleryMode::plain;
    if (name == "mask_augmented") return GalleryMode::mask_augmented;
    throw InvalidConfig("unknown gallery mode: " + name);
}

void IdentityGallery::insert(const std::string& identity, const std::vector<double>& embedding) {
    if (static_cast<int>(embedding.size()) != dim_) {
        throw ShapeMismatch("gallery entry has wrong dimension for " + identity);
    }
    entries_[identity] = unit_normalized(embedding);
}

const std::vector<double>& IdentityGallery::entry(const std::string& identity) const {
    auto it = entries_.find(identity);
    if (it == entries_.end()) throw MissingIdentity("identity not enrolled: " + identity);
    return it->second;
}

std::vector<std::string> IdentityGallery::identities() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [id, _] : entries_) out.push_back(id);
    return out;
}

namespace {

constexpr char kGalleryMagic[8] = {'A', 'M', 'G', 'A', 'L', 'L', 'R', '1'};
constexpr std::uint32_t kGalleryVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

void write_string(std::ostream& out, const std::string& s) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
    const auto len = read_pod<std::uint32_t>(in);
    std::string s(len, '\0');
    in.read(s.data(), len);
    return s;
}

}  // namespace

void IdentityGallery::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write gallery: " + path);
    out.write(kGalleryMagic, sizeof(kGalleryMagic));
    write_pod(out, kGalleryVersion);
    write_string(out, model_name_);
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(dim_));
    write_pod<std::uint8_t>(out, mode_ == GalleryMode::plain ? 0 : 1);
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(entries_.size()));
    for (const auto& [identity, vec] : entries_) {
        write_string(out, identity);
        for (double v : vec) write_pod<float>(out, static_cast<float>(v));
    }
}

IdentityGallery IdentityGallery::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open gallery: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kGalleryMagic, sizeof(magic)) != 0) {
        throw IoError("bad gallery magic: " + path);
    }
    const auto version = read_pod<std::uint32_t>(in);
    if (version != kGalleryVersion) throw IoError("unsupported gallery version");
    const std::string model_name = read_string(in);
    const auto dim = read_pod<std::uint32_t>(in);
    const auto mode_byte = read_pod<std::uint8_t>(in);
    const auto count = read_pod<std::uint32_t>(in);
    IdentityGallery gallery(model_name, static_cast<int>(dim),
                            mode_byte == 0 ? GalleryMode::plain : GalleryMode::mask_augmented);
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::string identity = read_string(in);
        std::vector<double> vec(dim);
        for (double& v : vec) v = static_cast<double>(read_pod<float>(in));
        if (!in) throw IoError("truncated gallery: " + path);
        // float32 storage drifts the norm slightly; insert renormalizes.
        gallery.insert(identity, vec);
    }
    return gallery;
}

IdentityGallery build_gallery(const EmbeddingModel& model, const ImagesByIdentity& images,
                              GalleryMode mode, const std::vector<MaskTexture>& standard_masks,
                              const RenderContext& ctx, Rng& rng) {
    if (mode == GalleryMode::mask_augmented && standard_masks.empty()) {
        throw InvalidConfig("mask_augmented gallery needs at least one standard mask");
    }
    IdentityGallery gallery(model.name(), model.dim(), mode);
    for (const auto& [identity, samples] : images) {
        if (samples.empty()) throw EmptyIdentity("identity has no images: " + identity);
        std::vector<double> mean(model.dim(), 0.0);
        int n = 0;
        auto accumulate = [&](const Image& img) {
            const std::vector<double> e = unit_normalized(model.embed(img));
            for (int i = 0; i < model.dim(); ++i) mean[i] += e[i];
            ++n;
        };
        for (const FaceSample& sample : samples) {
            accumulate(sample.image);
            if (mode == GalleryMode::mask_augmented) {
                const size_t pick = static_cast<size_t>(
                    rng.uniform_int(0, static_cast<std::int64_t>(standard_masks.size()) - 1));
                try {
                    accumulate(render_with(ctx, standard_masks[pick], sample,
                                           AugmentationParams::identity()));
                } catch (const Error& e) {
                    throw RenderFailure("gallery render failed for " + identity + ": " + e.what());
                }
            }
        }
        for (double& v : mean) v /= n;
        gallery.insert(identity, mean);
    }
    return gallery;
}

}  // namespace advmask
