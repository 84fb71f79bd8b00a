#pragma once

#include <memory>
#include <vector>

#include "advmask/embedding.hpp"
#include "advmask/gallery.hpp"
#include "advmask/mask_texture.hpp"
#include "advmask/render.hpp"
#include "advmask/rng.hpp"

namespace advmask {

/// Batch mean of cos(embed(render(mask, x)), gallery[x.identity]) for one
/// model; in [-1, 1]. One augmentation draw per face, sequential from rng.
double loss_sim_raw(const MaskTexture& mask, const std::vector<FaceSample>& faces,
                    const EmbeddingModel& model, const IdentityGallery& gallery,
                    const RenderContext& ctx, Rng& rng);

/// Ensemble similarity loss mapped into [0, 1]: mean over models of the
/// batch mean of (cos + 1) / 2. The per-face augmentation draw is shared
/// across models, so the ensemble value equals the arithmetic mean of the
/// single-model normalized losses under the same rng state.
double loss_sim_normalized(const MaskTexture& mask, const std::vector<FaceSample>& faces,
                           const ModelList& models, const GalleryList& galleries,
                           const RenderContext& ctx, Rng& rng);

/// Raw total variation: sum over pixels and channels of
/// sqrt((p[i,k]-p[i+1,k])^2 + (p[i,k]-p[i,k+1])^2), with missing neighbors
/// contributing 0 (edge replication). Accepts any H x W x C array.
double loss_tv(const Image& pixels);

/// loss_tv / (H * W * C * sqrt(2)), which lands in [0, 1] for inputs in [0,1].
double loss_tv_normalized(const Image& pixels);

/// Subgradient of loss_tv (raw or normalized); zero where a term's norm is 0.
Image loss_tv_grad(const Image& pixels, bool normalized);

struct TotalLossValue {
    double total = 0.0;  // sim + lambda_tv * tv
    double sim = 0.0;    // normalized ensemble similarity, in [0,1]
    double tv = 0.0;     // normalized TV, in [0,1]
};

/// Total objective: loss_sim_normalized + lambda_tv * loss_tv_normalized.
TotalLossValue total_loss(const MaskTexture& mask, const std::vector<FaceSample>& faces,
                          const ModelList& models, const GalleryList& galleries,
                          double lambda_tv, const RenderContext& ctx, Rng& rng);

struct TotalLossGradient {
    TotalLossValue value;
    Image grad;  // d total / d mask.pixels, same shape as the texture
};

/// Total objective plus its analytic gradient with respect to mask pixels.
/// `workers` > 1 fans the per-face work out to threads; the reduction order
/// is fixed, so results do not depend on scheduling.
TotalLossGradient total_loss_grad(const MaskTexture& mask, const std::vector<FaceSample>& faces,
                                  const ModelList& models, const GalleryList& galleries,
                                  double lambda_tv, const RenderContext& ctx, Rng& rng,
                                  int workers = 1);

}  // namespace advmask
