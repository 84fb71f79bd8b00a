#include <benchmark/benchmark.h>

#include "advmask/embedding.hpp"
#include "advmask/face.hpp"
#include "advmask/losses.hpp"
#include "advmask/render.hpp"

using namespace advmask;

namespace {

RenderContext context() {
    RenderContext ctx;
    ctx.reconstruction = std::make_shared<EllipsoidBackend>();
    ctx.augmentation = AugmentationConfig();
    return ctx;
}

void BM_Render(benchmark::State& state) {
    const RenderContext ctx = context();
    const FaceSample face = synth_face("bench", 0);
    const MaskTexture mask = standard_mask(StandardMaskColor::blue);
    const UVCorrespondence& uv = ctx.uv_for(face);
    AugmentationParams params;
    params.rotation_deg = 3.0;
    params.noise_sigma = 0.01;
    params.noise_seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(render(mask, face, uv, params));
    }
}
BENCHMARK(BM_Render);

void BM_RenderBackward(benchmark::State& state) {
    const RenderContext ctx = context();
    const FaceSample face = synth_face("bench", 0);
    const MaskTexture mask = standard_mask(StandardMaskColor::blue);
    const UVCorrespondence& uv = ctx.uv_for(face);
    const AugmentationParams params;
    const Image grad(112, 112, 3, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(render_backward(mask, face, uv, params, grad));
    }
}
BENCHMARK(BM_RenderBackward);

void BM_Embed(benchmark::State& state) {
    const FrozenConvNet model(ModelInfo{"bench", 64, static_cast<int>(state.range(0)),
                                        "arcface", "toy"},
                              7);
    const FaceSample face = synth_face("bench", 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.embed(face.image));
    }
}
BENCHMARK(BM_Embed)->Arg(1)->Arg(2)->Arg(4);

void BM_EmbedBackward(benchmark::State& state) {
    const FrozenConvNet model(ModelInfo{"bench", 64, 2, "arcface", "toy"}, 7);
    const FaceSample face = synth_face("bench", 0);
    const std::vector<double> grad(64, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.embed_backward(face.image, grad));
    }
}
BENCHMARK(BM_EmbedBackward);

void BM_TotalVariation(benchmark::State& state) {
    Rng rng(3);
    MaskTexture mask = random_mask(rng, default_mask_support());
    for (auto _ : state) {
        benchmark::DoNotOptimize(loss_tv(mask.pixels));
        benchmark::DoNotOptimize(loss_tv_grad(mask.pixels, true));
    }
}
BENCHMARK(BM_TotalVariation);

void BM_UvReconstruction(benchmark::State& state) {
    const FaceSample face = synth_face("bench", 0);
    const EllipsoidBackend backend;
    for (auto _ : state) {
        benchmark::DoNotOptimize(reconstruct_uv(face.image, face.landmarks, backend));
    }
}
BENCHMARK(BM_UvReconstruction);

}  // namespace

BENCHMARK_MAIN();
