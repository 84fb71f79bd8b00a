#include "advmask/losses.hpp"

#include <cmath>

#include "advmask/errors.hpp"
#include "advmask/parallel.hpp"

namespace advmask {

namespace {

void check_alignment(const ModelList& models, const GalleryList& galleries) {
    if (models.empty()) throw InvalidConfig("loss needs a nonempty model ensemble");
    if (models.size() != galleries.size()) {
        throw InvalidConfig("one gallery per ensemble model required");
    }
    for (size_t j = 0; j < models.size(); ++j) {
        if (galleries[j]->model_name() != models[j]->name()) {
            throw InvalidConfig("gallery '" + galleries[j]->model_name() +
                                "' does not belong to model '" + models[j]->name() + "'");
        }
        if (galleries[j]->dim() != models[j]->dim()) {
            throw ShapeMismatch("gallery dimension does not match model dimension");
        }
    }
}

std::vector<AugmentationParams> draw_params(const std::vector<FaceSample>& faces, Rng& rng,
                                            const AugmentationConfig& config) {
    std::vector<AugmentationParams> params;
    params.reserve(faces.size());
    for (size_t i = 0; i < faces.size(); ++i) params.push_back(sample_augmentation(rng, config));
    return params;
}

}  // namespace

double loss_sim_raw(const MaskTexture& mask, const std::vector<FaceSample>& faces,
                    const EmbeddingModel& model, const IdentityGallery& gallery,
                    const RenderContext& ctx, Rng& rng) {
    if (faces.empty()) throw InvalidConfig("loss_sim_raw: empty batch");
    const auto params = draw_params(faces, rng, ctx.augmentation);
    double acc = 0.0;
    for (size_t i = 0; i < faces.size(); ++i) {
        const std::vector<double>& gt = gallery.entry(faces[i].identity);
        const Image rendered = render_with(ctx, mask, faces[i], params[i]);
        acc += cosine_similarity(model.embed(rendered), gt);
    }
    return acc / static_cast<double>(faces.size());
}

double loss_sim_normalized(const MaskTexture& mask, const std::vector<FaceSample>& faces,
                           const ModelList& models, const GalleryList& galleries,
                           const RenderContext& ctx, Rng& rng) {
    if (faces.empty()) throw InvalidConfig("loss_sim_normalized: empty batch");
    check_alignment(models, galleries);
    const auto params = draw_params(faces, rng, ctx.augmentation);
    double acc = 0.0;
    for (size_t i = 0; i < faces.size(); ++i) {
        const Image rendered = render_with(ctx, mask, faces[i], params[i]);
        for (size_t j = 0; j < models.size(); ++j) {
            const std::vector<double>& gt = galleries[j]->entry(faces[i].identity);
            acc += 0.5 * (cosine_similarity(models[j]->embed(rendered), gt) + 1.0);
        }
    }
    return acc / (static_cast<double>(faces.size()) * static_cast<double>(models.size()));
}

double loss_tv(const Image& pixels) {
    double acc = 0.0;
    for (int y = 0; y < pixels.height; ++y) {
        for (int x = 0; x < pixels.width; ++x) {
            for (int c = 0; c < pixels.channels; ++c) {
                const double p = pixels.at(y, x, c);
                const double dx = y + 1 < pixels.height ? p - pixels.at(y + 1, x, c) : 0.0;
                const double dy = x + 1 < pixels.width ? p - pixels.at(y, x + 1, c) : 0.0;
                acc += std::sqrt(dx * dx + dy * dy);
            }
        }
    }
    return acc;
}

double loss_tv_normalized(const Image& pixels) {
    const double denom = static_cast<double>(pixels.height) * pixels.width * pixels.channels *
                         std::sqrt(2.0);
    return loss_tv(pixels) / denom;
}

Image loss_tv_grad(const Image& pixels, bool normalized) {
    Image grad = Image::zeros_like(pixels);
    for (int y = 0; y < pixels.height; ++y) {
        for (int x = 0; x < pixels.width; ++x) {
            for (int c = 0; c < pixels.channels; ++c) {
                const double p = pixels.at(y, x, c);
                const double dx = y + 1 < pixels.height ? p - pixels.at(y + 1, x, c) : 0.0;
                const double dy = x + 1 < pixels.width ? p - pixels.at(y, x + 1, c) : 0.0;
                const double norm = std::sqrt(dx * dx + dy * dy);
                if (norm == 0.0) continue;  // subgradient 0 on flat terms
                grad.at(y, x, c) += (dx + dy) / norm;
                if (y + 1 < pixels.height) grad.at(y + 1, x, c) -= dx / norm;
                if (x + 1 < pixels.width) grad.at(y, x + 1, c) -= dy / norm;
            }
        }
    }
    if (normalized) {
        const double denom = static_cast<double>(pixels.height) * pixels.width *
                             pixels.channels * std::sqrt(2.0);
        for (double& v : grad.data) v /= denom;
    }
    return grad;
}

TotalLossValue total_loss(const MaskTexture& mask, const std::vector<FaceSample>& faces,
                          const ModelList& models, const GalleryList& galleries,
                          double lambda_tv, const RenderContext& ctx, Rng& rng) {
    if (lambda_tv < 0.0) throw InvalidConfig("lambda_tv must be non-negative");
    TotalLossValue value;
    value.sim = loss_sim_normalized(mask, faces, models, galleries, ctx, rng);
    value.tv = loss_tv_normalized(mask.pixels);
    value.total = value.sim + lambda_tv * value.tv;
    return value;
}

TotalLossGradient total_loss_grad(const MaskTexture& mask, const std::vector<FaceSample>& faces,
                                  const ModelList& models, const GalleryList& galleries,
                                  double lambda_tv, const RenderContext& ctx, Rng& rng,
                                  int workers) {
    if (faces.empty()) throw InvalidConfig("total_loss_grad: empty batch");
    if (lambda_tv < 0.0) throw InvalidConfig("lambda_tv must be non-negative");
    check_alignment(models, galleries);
    const auto params = draw_params(faces, rng, ctx.augmentation);

    const int n = static_cast<int>(faces.size());
    const int m = static_cast<int>(models.size());
    // d(sim)/d(cos_ij) for the double mean over faces and models, with the
    // (cos+1)/2 range mapping.
    const double cos_weight = 0.5 / (static_cast<double>(n) * static_cast<double>(m));

    std::vector<double> per_face_cos_sum(n, 0.0);
    std::vector<Image> per_face_grad(n);

    parallel_for(n, workers, [&](int i) {
        const FaceSample& face = faces[i];
        const UVCorrespondence& uv = ctx.uv_for(face);
        const Image rendered = render(mask, face, uv, params[i]);
        Image grad_rendered = Image::zeros_like(rendered);
        double cos_sum = 0.0;
        for (int j = 0; j < m; ++j) {
            const std::vector<double>& gt = galleries[j]->entry(face.identity);
            const std::vector<double> e = models[j]->embed(rendered);
            cos_sum += cosine_similarity(e, gt);
            std::vector<double> grad_e = cosine_grad_a(e, gt);
            for (double& g : grad_e) g *= cos_weight;
            const Image g_img = models[j]->embed_backward(rendered, grad_e);
            for (size_t k = 0; k < grad_rendered.data.size(); ++k) {
                grad_rendered.data[k] += g_img.data[k];
            }
        }
        per_face_cos_sum[i] = cos_sum;
        per_face_grad[i] = render_backward(mask, face, uv, params[i], grad_rendered);
    });

    TotalLossGradient out;
    out.grad = Image(mask.height(), mask.width(), 3);
    double cos_total = 0.0;
    for (int i = 0; i < n; ++i) {
        cos_total += per_face_cos_sum[i];
        for (size_t k = 0; k < out.grad.data.size(); ++k) {
            out.grad.data[k] += per_face_grad[i].data[k];
        }
    }
    out.value.sim = 0.5 * (cos_total / (static_cast<double>(n) * m) + 1.0);
    out.value.tv = loss_tv_normalized(mask.pixels);
    out.value.total = out.value.sim + lambda_tv * out.value.tv;

    const Image tv_grad = loss_tv_grad(mask.pixels, /*normalized=*/true);
    for (size_t k = 0; k < out.grad.data.size(); ++k) {
        out.grad.data[k] += lambda_tv * tv_grad.data[k];
    }
    return out;
}

}  // namespace advmask
