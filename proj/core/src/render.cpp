#include "advmask/render.hpp"

#include <cmath>

#include "advmask/errors.hpp"

namespace advmask {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSupportThreshold = 0.5;

struct Anchors {
    Point2 nose_bridge, chin, left_cheek, right_cheek;
};

Anchors anchor_points(const std::vector<Point2>& lm) {
    const Point2 le = lm[0], re = lm[1], nose = lm[2], ml = lm[3], mr = lm[4];
    const Point2 eye_mid{0.5 * (le.x + re.x), 0.5 * (le.y + re.y)};
    const Point2 mouth_mid{0.5 * (ml.x + mr.x), 0.5 * (ml.y + mr.y)};
    const Point2 lateral{re.x - le.x, re.y - le.y};
    const Point2 down{mouth_mid.x - eye_mid.x, mouth_mid.y - eye_mid.y};
    Anchors a;
    a.nose_bridge = {nose.x + 0.45 * (eye_mid.x - nose.x), nose.y + 0.45 * (eye_mid.y - nose.y)};
    a.chin = {mouth_mid.x + 0.40 * down.x, mouth_mid.y + 0.40 * down.y};
    a.left_cheek = {mouth_mid.x - 0.95 * lateral.x, mouth_mid.y - 0.95 * lateral.y};
    a.right_cheek = {mouth_mid.x + 0.95 * lateral.x, mouth_mid.y + 0.95 * lateral.y};
    return a;
}

// Maps an anchor into UV space, sliding it toward the visible-region
// centroid when it falls outside the reconstructed area.
UvCoord map_anchor(const Point2& anchor, const Point2& centroid, const UVCorrespondence& uv) {
    for (int step = 0; step <= 16; ++step) {
        const double t = step / 16.0;
        const Point2 p{anchor.x + t * (centroid.x - anchor.x),
                       anchor.y + t * (centroid.y - anchor.y)};
        if (auto coord = uv.map_point(p)) return *coord;
    }
    throw ReconstructionFailed("mask anchor cannot be mapped into the visible region");
}

Point2 visible_centroid(const UVCorrespondence& uv) {
    double sx = 0.0, sy = 0.0;
    int n = 0;
    for (int y = 0; y < uv.valid_mask.height; ++y) {
        for (int x = 0; x < uv.valid_mask.width; ++x) {
            if (uv.valid_at(x, y)) {
                sx += x;
                sy += y;
                ++n;
            }
        }
    }
    if (n == 0) throw ReconstructionFailed("empty visible region");
    return {sx / n, sy / n};
}

// Inverse rigid transform from mask-texture coordinates to source sampling
// coordinates: the forward augmentation rotates about the texture center and
// then translates.
struct InverseRigid {
    double cos_a, sin_a, cx, cy, tx, ty;

    void apply(double x, double y, double& sx, double& sy) const {
        const double dx = x - cx - tx;
        const double dy = y - cy - ty;
        sx = cos_a * dx + sin_a * dy + cx;
        sy = -sin_a * dx + cos_a * dy + cy;
    }
};

InverseRigid make_inverse_rigid(const MaskTexture& mask, const AugmentationParams& params) {
    const double a = params.rotation_deg * kPi / 180.0;
    return InverseRigid{std::cos(a), std::sin(a), (mask.width() - 1) * 0.5,
                        (mask.height() - 1) * 0.5, params.translate_x, params.translate_y};
}

Image make_noise_raster(const FaceSample& face, const AugmentationParams& params) {
    Image noise;
    if (params.noise_sigma > 0.0) {
        noise = Image(face.image.height, face.image.width, 3);
        Rng noise_rng(params.noise_seed);
        for (double& v : noise.data) v = params.noise_sigma * noise_rng.gaussian();
    }
    return noise;
}

}  // namespace

MaskPlacement compute_mask_placement(const std::vector<Point2>& landmarks,
                                     const UVCorrespondence& uv) {
    if (landmarks.size() < 5) throw InvalidConfig("mask placement needs at least 5 landmarks");
    const Anchors a = anchor_points(landmarks);
    const Point2 centroid = visible_centroid(uv);
    MaskPlacement placement;
    placement.u_min = map_anchor(a.left_cheek, centroid, uv).u;
    placement.u_max = map_anchor(a.right_cheek, centroid, uv).u;
    placement.v_min = map_anchor(a.nose_bridge, centroid, uv).v;
    placement.v_max = map_anchor(a.chin, centroid, uv).v;
    if (!(placement.u_min < placement.u_max) || !(placement.v_min < placement.v_max)) {
        throw ReconstructionFailed("degenerate mask placement quad");
    }
    return placement;
}

Image render(const MaskTexture& mask, const FaceSample& face, const UVCorrespondence& uv,
             const AugmentationParams& params) {
    mask.validate();
    face.validate();
    if (uv.valid_mask.height != face.image.height || uv.valid_mask.width != face.image.width) {
        throw ShapeMismatch("render: UV correspondence does not match face image");
    }

    const MaskPlacement pl = compute_mask_placement(face.landmarks, uv);
    const InverseRigid rigid = make_inverse_rigid(mask, params);
    const Image noise = make_noise_raster(face, params);
    const double su = (mask.width() - 1) / (pl.u_max - pl.u_min);
    const double sv = (mask.height() - 1) / (pl.v_max - pl.v_min);

    Image out = face.image;
    bool projected_any = false;
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            if (!uv.valid_at(x, y)) continue;
            const UvCoord c = uv.uv_at(x, y);
            const double tx = (c.u - pl.u_min) * su;
            const double ty = (c.v - pl.v_min) * sv;
            double sx, sy;
            rigid.apply(tx, ty, sx, sy);
            if (sx < -1.0 || sx > mask.width() || sy < -1.0 || sy > mask.height()) continue;
            if (bilinear_zero(mask.support, sx, sy, 0) < kSupportThreshold) continue;
            projected_any = true;
            for (int ch = 0; ch < 3; ++ch) {
                double val = bilinear_clamp(mask.pixels, sx, sy, ch);
                val = params.contrast * val + params.brightness;
                if (!noise.empty()) val += noise.at(y, x, ch);
                out.at(y, x, ch) = clamp01(val);
            }
        }
    }
    if (!projected_any && !mask.support_empty()) {
        throw OutOfFrame("augmented mask projected entirely outside the image");
    }
    return out;
}

Image render_backward(const MaskTexture& mask, const FaceSample& face,
                      const UVCorrespondence& uv, const AugmentationParams& params,
                      const Image& grad_output) {
    if (!grad_output.same_shape(face.image)) {
        throw ShapeMismatch("render_backward: gradient does not match face image");
    }
    const MaskPlacement pl = compute_mask_placement(face.landmarks, uv);
    const InverseRigid rigid = make_inverse_rigid(mask, params);
    const Image noise = make_noise_raster(face, params);
    const double su = (mask.width() - 1) / (pl.u_max - pl.u_min);
    const double sv = (mask.height() - 1) / (pl.v_max - pl.v_min);

    Image grad_mask(mask.height(), mask.width(), 3);
    for (int y = 0; y < face.image.height; ++y) {
        for (int x = 0; x < face.image.width; ++x) {
            if (!uv.valid_at(x, y)) continue;
            const UvCoord c = uv.uv_at(x, y);
            const double tx = (c.u - pl.u_min) * su;
            const double ty = (c.v - pl.v_min) * sv;
            double sx, sy;
            rigid.apply(tx, ty, sx, sy);
            if (sx < -1.0 || sx > mask.width() || sy < -1.0 || sy > mask.height()) continue;
            if (bilinear_zero(mask.support, sx, sy, 0) < kSupportThreshold) continue;
            const BilinearTaps taps = bilinear_taps_clamp(mask.pixels, sx, sy);
            for (int ch = 0; ch < 3; ++ch) {
                double val = bilinear_clamp(mask.pixels, sx, sy, ch);
                val = params.contrast * val + params.brightness;
                if (!noise.empty()) val += noise.at(y, x, ch);
                // Clamp gate: saturated contributions carry no gradient.
                if (val <= 0.0 || val >= 1.0) continue;
                const double g = grad_output.at(y, x, ch) * params.contrast;
                if (g == 0.0) continue;
                for (int t = 0; t < 4; ++t) {
                    grad_mask.at(taps.y[t], taps.x[t], ch) += g * taps.w[t];
                }
            }
        }
    }
    return grad_mask;
}

std::shared_ptr<const UVCorrespondence> UvCache::get(const FaceSample& face,
                                                     const ReconstructionBackend& backend) const {
    std::uint64_t key = fnv1a64(backend.name());
    key = fnv1a64(face.landmarks.data(), face.landmarks.size() * sizeof(Point2), key);
    const std::uint64_t content = content_hash(face.image);
    key = fnv1a64(&content, sizeof(content), key);

    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = entries_.find(key);
        if (it != entries_.end()) return it->second;
    }
    auto uv = std::make_shared<UVCorrespondence>(
        reconstruct_uv(face.image, face.landmarks, backend));
    std::lock_guard<std::mutex> lock(mutex_);
    auto [it, inserted] = entries_.emplace(key, std::move(uv));
    return it->second;
}

const UVCorrespondence& RenderContext::uv_for(const FaceSample& face) const {
    if (!reconstruction) throw InvalidConfig("render context has no reconstruction backend");
    // The cache keeps the shared_ptr alive for the context's lifetime.
    return *cache->get(face, *reconstruction);
}

Image render_with(const RenderContext& ctx, const MaskTexture& mask, const FaceSample& face,
                  const AugmentationParams& params) {
    return render(mask, face, ctx.uv_for(face), params);
}

namespace {

[[noreturn]] void rethrow_with_index(const Error& e, size_t index) {
    throw Error(e.code(), e.category(),
                "render_batch item " + std::to_string(index) + ": " + e.what());
}

}  // namespace

std::vector<Image> render_batch(const MaskTexture& mask, const std::vector<FaceSample>& faces,
                                Rng& rng, const RenderContext& ctx) {
    if (faces.empty()) throw InvalidConfig("render_batch: empty face list");
    std::vector<Image> out;
    out.reserve(faces.size());
    for (size_t i = 0; i < faces.size(); ++i) {
        const AugmentationParams params = sample_augmentation(rng, ctx.augmentation);
        try {
            out.push_back(render_with(ctx, mask, faces[i], params));
        } catch (const Error& e) {
            rethrow_with_index(e, i);
        }
    }
    return out;
}

std::vector<Image> render_batch_keyed(const MaskTexture& mask,
                                      const std::vector<FaceSample>& faces, const Rng& base_rng,
                                      const RenderContext& ctx) {
    if (faces.empty()) throw InvalidConfig("render_batch: empty face list");
    std::vector<Image> out;
    out.reserve(faces.size());
    for (size_t i = 0; i < faces.size(); ++i) {
        Rng face_rng = base_rng.substream("face", fnv1a64(faces[i].identity));
        const AugmentationParams params = sample_augmentation(face_rng, ctx.augmentation);
        try {
            out.push_back(render_with(ctx, mask, faces[i], params));
        } catch (const Error& e) {
            rethrow_with_index(e, i);
        }
    }
    return out;
}

}  // namespace advmask
