#pragma once

#include <map>
#include <string>
#include <vector>

#include "advmask/embedding.hpp"
#include "advmask/face.hpp"
#include "advmask/mask_texture.hpp"
#include "advmask/render.hpp"
#include "advmask/rng.hpp"

namespace advmask {

enum class GalleryMode { plain, mask_augmented };

const char* gallery_mode_name(GalleryMode mode);
GalleryMode gallery_mode_from_name(const std::string& name);

/// Enrolled ground-truth embeddings: one unit-norm vector per identity, all
/// produced by the same model. Immutable after construction.
class IdentityGallery {
public:
    IdentityGallery(std::string model_name, int dim, GalleryMode mode)
        : model_name_(std::move(model_name)), dim_(dim), mode_(mode) {}

    /// Stores the unit-normalized copy of `embedding`.
    void insert(const std::string& identity, const std::vector<double>& embedding);

    const std::vector<double>& entry(const std::string& identity) const;
    bool contains(const std::string& identity) const { return entries_.count(identity) != 0; }
    size_t size() const { return entries_.size(); }
    std::vector<std::string> identities() const;

    const std::string& model_name() const { return model_name_; }
    int dim() const { return dim_; }
    GalleryMode mode() const { return mode_; }

    /// Binary persistence: header (magic, version, model name, dim, mode,
    /// count), then per entry a length-prefixed UTF-8 identity key and dim
    /// little-endian float32 components.
    void save(const std::string& path) const;
    static IdentityGallery load(const std::string& path);

private:
    std::string model_name_;
    int dim_;
    GalleryMode mode_;
    std::map<std::string, std::vector<double>> entries_;
};

using ImagesByIdentity = std::map<std::string, std::vector<FaceSample>>;
using GalleryList = std::vector<const IdentityGallery*>;

/// Builds the enrolled gallery.
///
/// plain: renormalized mean of per-image unit-normalized embeddings.
/// mask_augmented: the mean additionally includes, per original image, one
/// rendered masked copy whose texture is drawn uniformly from
/// `standard_masks` (identity augmentation parameters).
IdentityGallery build_gallery(const EmbeddingModel& model, const ImagesByIdentity& images,
                              GalleryMode mode, const std::vector<MaskTexture>& standard_masks,
                              const RenderContext& ctx, Rng& rng);

}  // namespace advmask
