#pragma once

#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "advmask/augmentation.hpp"
#include "advmask/face.hpp"
#include "advmask/image.hpp"
#include "advmask/mask_texture.hpp"
#include "advmask/reconstruction.hpp"
#include "advmask/rng.hpp"

namespace advmask {

/// UV-space rectangle the mask texture is pinned to. Derived from the
/// chin/cheek/nose-bridge anchor points of a face's landmarks.
struct MaskPlacement {
    double u_min = 0.0, u_max = 1.0;
    double v_min = 0.0, v_max = 1.0;
};

MaskPlacement compute_mask_placement(const std::vector<Point2>& landmarks,
                                     const UVCorrespondence& uv);

/// Projects the mask texture onto the face through the UV correspondence.
///
/// Geometric augmentation acts on texture coordinates (UV space) before
/// combination; color augmentation acts on the mask contribution only, then
/// the contribution is clamped to [0,1]. Pixels whose projected support
/// stays below 0.5 are copied from the face bitwise. Bilinear interpolation
/// throughout keeps the output differentiable w.r.t. mask pixels.
///
/// Throws OutOfFrame when a non-empty support projects to zero pixels.
Image render(const MaskTexture& mask, const FaceSample& face, const UVCorrespondence& uv,
             const AugmentationParams& params);

/// Vector-Jacobian product of render: given dL/d(output image), returns
/// dL/d(mask pixels) for the same (face, uv, params).
Image render_backward(const MaskTexture& mask, const FaceSample& face,
                      const UVCorrespondence& uv, const AugmentationParams& params,
                      const Image& grad_output);

/// Memoizes UV correspondences per (backend, image content, landmarks).
/// Thread-safe; backends are immutable after load.
class UvCache {
public:
    std::shared_ptr<const UVCorrespondence> get(const FaceSample& face,
                                                const ReconstructionBackend& backend) const;

private:
    mutable std::mutex mutex_;
    mutable std::unordered_map<std::uint64_t, std::shared_ptr<const UVCorrespondence>> entries_;
};

/// Everything rendering needs besides the mask and the face.
struct RenderContext {
    std::shared_ptr<const ReconstructionBackend> reconstruction;
    AugmentationConfig augmentation;
    std::shared_ptr<UvCache> cache = std::make_shared<UvCache>();

    const UVCorrespondence& uv_for(const FaceSample& face) const;
};

/// Convenience: resolve the UV correspondence from the context and render.
Image render_with(const RenderContext& ctx, const MaskTexture& mask, const FaceSample& face,
                  const AugmentationParams& params);

/// Renders a batch with augmentation parameters drawn sequentially from rng
/// (one draw per face, in order). Per-item failures are rethrown with the
/// item index prepended.
std::vector<Image> render_batch(const MaskTexture& mask, const std::vector<FaceSample>& faces,
                                Rng& rng, const RenderContext& ctx);

/// Batch variant with per-face RNG streams keyed by face identity; the
/// result for a face does not depend on its position in the batch.
std::vector<Image> render_batch_keyed(const MaskTexture& mask,
                                      const std::vector<FaceSample>& faces, const Rng& base_rng,
                                      const RenderContext& ctx);

}  // namespace advmask
