#include <doctest.h>

#include <cmath>

#include "advmask/errors.hpp"
#include "advmask/face.hpp"
#include "advmask/render.hpp"
#include "advmask/rng.hpp"

using namespace advmask;

namespace {

RenderContext make_context() {
    RenderContext ctx;
    ctx.reconstruction = std::make_shared<EllipsoidBackend>();
    ctx.augmentation = AugmentationConfig();
    return ctx;
}

// Independent restatement of the projected-support predicate: UV lookup,
// placement-quad mapping, inverse rigid transform, zero-padded support read.
bool oracle_projected(const MaskTexture& mask, const UVCorrespondence& uv,
                      const MaskPlacement& pl, const AugmentationParams& params, int x, int y) {
    if (!uv.valid_at(x, y)) return false;
    const UvCoord c = uv.uv_at(x, y);
    const double tx = (c.u - pl.u_min) / (pl.u_max - pl.u_min) * (mask.width() - 1);
    const double ty = (c.v - pl.v_min) / (pl.v_max - pl.v_min) * (mask.height() - 1);
    const double a = params.rotation_deg * M_PI / 180.0;
    const double cx = (mask.width() - 1) * 0.5, cy = (mask.height() - 1) * 0.5;
    const double dx = tx - cx - params.translate_x;
    const double dy = ty - cy - params.translate_y;
    const double sx = std::cos(a) * dx + std::sin(a) * dy + cx;
    const double sy = -std::sin(a) * dx + std::cos(a) * dy + cy;
    if (sx < -1.0 || sx > mask.width() || sy < -1.0 || sy > mask.height()) return false;
    return bilinear_zero(mask.support, sx, sy, 0) >= 0.5;
}

MaskTexture interior_random_mask(Rng& rng, const Image& support) {
    MaskTexture mask = random_mask(rng, support);
    // Keep values off the clamp boundaries so color augmentation stays in
    // the linear regime for gradient checks.
    for (double& v : mask.pixels.data) v = 0.25 + 0.5 * v;
    return mask;
}

}  // namespace

TEST_CASE("empty support reproduces the face bitwise") {
    const RenderContext ctx = make_context();
    const FaceSample face = synth_face("empty", 0);
    const MaskTexture mask = make_uniform_mask(0.3, 0.6, 0.9, Image(60, 112, 1, 0.0));
    const Image out = render_with(ctx, mask, face, AugmentationParams::identity());
    CHECK(max_abs_diff(out, face.image) == 0.0);
}

TEST_CASE("identity augmentation projects a uniform texture opaquely") {
    const RenderContext ctx = make_context();
    const FaceSample face = synth_face("uniform", 0);
    const MaskTexture mask = make_uniform_mask(0.2, 0.4, 0.8, Image(60, 112, 1, 1.0));
    const Image out = render_with(ctx, mask, face, AugmentationParams::identity());

    int projected = 0;
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            const bool changed = out.at(y, x, 0) != face.image.at(y, x, 0) ||
                                 out.at(y, x, 1) != face.image.at(y, x, 1) ||
                                 out.at(y, x, 2) != face.image.at(y, x, 2);
            if (changed) {
                ++projected;
                CHECK(out.at(y, x, 0) == doctest::Approx(0.2).epsilon(1e-12));
                CHECK(out.at(y, x, 1) == doctest::Approx(0.4).epsilon(1e-12));
                CHECK(out.at(y, x, 2) == doctest::Approx(0.8).epsilon(1e-12));
            }
        }
    }
    // A sizeable lower-face patch must actually be covered.
    CHECK(projected > 400);
}

TEST_CASE("support locality holds for random masks, faces and params") {
    const RenderContext ctx = make_context();
    Rng rng(21);
    for (int trial = 0; trial < 12; ++trial) {
        const FaceSample face = synth_face("loc" + std::to_string(trial % 4), trial % 3);
        MaskTexture mask = random_mask(rng, default_mask_support());
        const UVCorrespondence& uv = ctx.uv_for(face);
        const MaskPlacement pl = compute_mask_placement(face.landmarks, uv);
        const AugmentationParams params = sample_augmentation(rng, ctx.augmentation);
        const Image out = render(mask, face, uv, params);
        for (int y = 0; y < out.height; ++y) {
            for (int x = 0; x < out.width; ++x) {
                if (oracle_projected(mask, uv, pl, params, x, y)) continue;
                for (int c = 0; c < 3; ++c) {
                    REQUIRE(out.at(y, x, c) == face.image.at(y, x, c));
                }
            }
        }
    }
}

TEST_CASE("outputs stay in [0,1] under extreme color augmentation") {
    const RenderContext ctx = make_context();
    const FaceSample face = synth_face("range", 0);
    Rng rng(5);
    MaskTexture mask = random_mask(rng, default_mask_support());
    AugmentationParams params;
    params.contrast = 1.8;
    params.brightness = 0.4;
    params.noise_sigma = 0.3;
    params.noise_seed = 77;
    const Image out = render_with(ctx, mask, face, params);
    for (double v : out.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("render gradient matches central finite differences") {
    const RenderContext ctx = make_context();
    const FaceSample face = synth_face("grad", 0);
    Rng rng(31);
    MaskTexture mask = interior_random_mask(rng, default_mask_support());
    const UVCorrespondence& uv = ctx.uv_for(face);

    AugmentationParams params;
    params.translate_x = 1.3;
    params.translate_y = -0.8;
    params.rotation_deg = 4.0;
    params.contrast = 1.03;
    params.brightness = 0.01;
    params.noise_sigma = 0.004;
    params.noise_seed = 99;

    // Scalar objective: fixed random weighting of the output image.
    Image weights(face.image.height, face.image.width, 3);
    for (double& v : weights.data) v = rng.uniform(-1.0, 1.0);
    auto objective = [&](const MaskTexture& m) {
        const Image out = render(m, face, uv, params);
        double acc = 0.0;
        for (size_t i = 0; i < out.data.size(); ++i) acc += out.data[i] * weights.data[i];
        return acc;
    };

    const Image analytic = render_backward(mask, face, uv, params, weights);

    int checked = 0;
    const double eps = 1e-6;
    while (checked < 10) {
        const int y = static_cast<int>(rng.uniform_int(0, mask.height() - 1));
        const int x = static_cast<int>(rng.uniform_int(0, mask.width() - 1));
        const int c = static_cast<int>(rng.uniform_int(0, 2));
        if (std::fabs(analytic.at(y, x, c)) < 1e-6) continue;  // pixel not projected
        MaskTexture plus = mask, minus = mask;
        plus.pixels.at(y, x, c) += eps;
        minus.pixels.at(y, x, c) -= eps;
        const double fd = (objective(plus) - objective(minus)) / (2.0 * eps);
        const double rel = std::fabs(fd - analytic.at(y, x, c)) /
                           std::max(1e-12, std::fabs(analytic.at(y, x, c)));
        CHECK(rel < 1e-3);
        ++checked;
    }
}

TEST_CASE("fully out-of-frame projection raises OutOfFrame") {
    const RenderContext ctx = make_context();
    const FaceSample face = synth_face("oof", 0);
    const MaskTexture mask = standard_mask(StandardMaskColor::blue);
    AugmentationParams params;
    params.translate_x = 500.0;  // push the whole texture off its quad
    CHECK_THROWS_AS(render_with(ctx, mask, face, params), OutOfFrame);
}

TEST_CASE("render_batch: singleton equals single render, fixed seed repeats") {
    const RenderContext ctx = make_context();
    const MaskTexture mask = standard_mask(StandardMaskColor::blue);
    const std::vector<FaceSample> faces = {synth_face("b0", 0), synth_face("b1", 0),
                                           synth_face("b2", 1)};

    Rng single_rng(17);
    const AugmentationParams params = sample_augmentation(single_rng, ctx.augmentation);
    const Image direct = render_with(ctx, mask, faces[0], params);

    Rng batch_rng(17);
    const std::vector<Image> one = render_batch(mask, {faces[0]}, batch_rng, ctx);
    CHECK(max_abs_diff(one[0], direct) == 0.0);

    Rng r1(23), r2(23);
    const auto batch1 = render_batch(mask, faces, r1, ctx);
    const auto batch2 = render_batch(mask, faces, r2, ctx);
    REQUIRE(batch1.size() == batch2.size());
    for (size_t i = 0; i < batch1.size(); ++i) {
        CHECK(max_abs_diff(batch1[i], batch2[i]) == 0.0);
    }
}

TEST_CASE("keyed batch rendering is order independent") {
    const RenderContext ctx = make_context();
    const MaskTexture mask = standard_mask(StandardMaskColor::white);
    std::vector<FaceSample> faces = {synth_face("k0", 0), synth_face("k1", 0),
                                     synth_face("k2", 0), synth_face("k3", 0)};
    const Rng base(71);
    const auto in_order = render_batch_keyed(mask, faces, base, ctx);
    std::vector<FaceSample> shuffled = {faces[2], faces[0], faces[3], faces[1]};
    const auto out_of_order = render_batch_keyed(mask, shuffled, base, ctx);
    CHECK(max_abs_diff(in_order[2], out_of_order[0]) == 0.0);
    CHECK(max_abs_diff(in_order[0], out_of_order[1]) == 0.0);
    CHECK(max_abs_diff(in_order[3], out_of_order[2]) == 0.0);
    CHECK(max_abs_diff(in_order[1], out_of_order[3]) == 0.0);
}

TEST_CASE("per-item batch errors carry the item index") {
    const RenderContext ctx = make_context();
    const MaskTexture mask = standard_mask(StandardMaskColor::blue);
    FaceSample bad = synth_face("bad", 0);
    bad.image.at(0, 0, 0) = 2.0;  // invalid pixel
    Rng rng(3);
    try {
        render_batch(mask, {synth_face("ok", 0), bad}, rng, ctx);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("item 1") != std::string::npos);
    }
}
