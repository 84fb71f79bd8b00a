#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "advmask/errors.hpp"
#include "advmask/eval.hpp"

using namespace advmask;

namespace {

struct EvalSetup {
    std::shared_ptr<FrozenConvNet> model;
    RenderContext ctx;

    EvalSetup() {
        model = std::make_shared<FrozenConvNet>(ModelInfo{"toy_a", 64, 2, "arcface", "toy"}, 101);
        ctx.reconstruction = std::make_shared<EllipsoidBackend>();
        ctx.augmentation = AugmentationConfig();
    }
};

// FAR over a score set at threshold t: fraction of scores >= t.
double far_at(const std::vector<double>& sims, double t) {
    int count = 0;
    for (double s : sims) count += s >= t ? 1 : 0;
    return static_cast<double>(count) / static_cast<double>(sims.size());
}

}  // namespace

TEST_CASE("clean condition against a self-built singleton gallery scores 1.0") {
    EvalSetup setup;
    const FaceSample face = synth_face("self", 0);
    IdentityGallery gallery("toy_a", 64, GalleryMode::plain);
    gallery.insert("self", setup.model->embed(face.image));
    Rng rng(1);
    const SimilarityReport report =
        eval_similarity(MaskCondition::clean(), {face}, *setup.model, gallery, setup.ctx, rng);
    REQUIRE(report.records.size() == 1);
    CHECK(report.records[0].cosine == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(report.records[0].condition == "clean");
    CHECK(report.records[0].model == "toy_a");
}

TEST_CASE("identical seeds reproduce identical reports for random conditions") {
    EvalSetup setup;
    std::vector<FaceSample> probes;
    IdentityGallery gallery("toy_a", 64, GalleryMode::plain);
    for (int i = 0; i < 4; ++i) {
        const std::string id = "rep" + std::to_string(i);
        probes.push_back(synth_face(id, 0));
        gallery.insert(id, setup.model->embed(synth_face(id, 1).image));
    }
    Rng mask_rng(5);
    const MaskCondition random_cond =
        MaskCondition::textured("random", random_mask(mask_rng, default_mask_support()));
    Rng r1(9), r2(9);
    const auto report1 = eval_similarity(random_cond, probes, *setup.model, gallery, setup.ctx, r1);
    const auto report2 = eval_similarity(random_cond, probes, *setup.model, gallery, setup.ctx, r2);
    REQUIRE(report1.records.size() == report2.records.size());
    for (size_t i = 0; i < report1.records.size(); ++i) {
        CHECK(report1.records[i].cosine == report2.records[i].cosine);
    }
}

TEST_CASE("aggregates are recomputable from the records") {
    SimilarityReport report;
    for (double v : {0.1, 0.9, 0.5, 0.3}) report.records.push_back({"i", "c", "m", v});
    const SimilarityAggregate agg = report.aggregate("c");
    CHECK(agg.count == 4);
    CHECK(agg.mean == doctest::Approx((0.1 + 0.9 + 0.5 + 0.3) / 4.0));
    CHECK(agg.median == doctest::Approx(0.4));
    CHECK(agg.min == doctest::Approx(0.1));
    CHECK(agg.max == doctest::Approx(0.9));
    CHECK(report.aggregate("absent").count == 0);
}

TEST_CASE("report CSV round trips") {
    SimilarityReport report;
    report.records.push_back({"id0", "clean", "toy_a", 0.731});
    report.records.push_back({"id1", "adv", "toy_a", -0.125});
    const auto path = (std::filesystem::temp_directory_path() / "advmask_report.csv").string();
    report.write_csv(path);
    const SimilarityReport loaded = SimilarityReport::read_csv(path);
    REQUIRE(loaded.records.size() == 2);
    CHECK(loaded.records[1].condition == "adv");
    CHECK(loaded.records[1].cosine == doctest::Approx(-0.125));
    std::remove(path.c_str());
}

TEST_CASE("1x1 transferability equals the eval mean for that pair") {
    EvalSetup setup;
    std::vector<FaceSample> probes;
    IdentityGallery gallery("toy_a", 64, GalleryMode::plain);
    for (int i = 0; i < 3; ++i) {
        const std::string id = "tm" + std::to_string(i);
        probes.push_back(synth_face(id, 0));
        gallery.insert(id, setup.model->embed(synth_face(id, 1).image));
    }
    const MaskCondition blue =
        MaskCondition::textured("blue", standard_mask(StandardMaskColor::blue));
    const Rng base(33);
    const TransferabilityMatrix matrix =
        transferability_matrix({blue}, {setup.model}, {&gallery}, probes, setup.ctx, base);
    REQUIRE(matrix.mean_cosine.size() == 1);
    REQUIRE(matrix.mean_cosine[0].size() == 1);

    Rng rng = base.substream("transfer/blue/toy_a");
    const SimilarityReport report =
        eval_similarity(blue, probes, *setup.model, gallery, setup.ctx, rng);
    CHECK(matrix.mean_cosine[0][0] == doctest::Approx(report.mean("blue")).epsilon(1e-12));
}

TEST_CASE("3-model transfer matrix matches independent per-cell evaluations") {
    RenderContext ctx;
    ctx.reconstruction = std::make_shared<EllipsoidBackend>();
    ctx.augmentation = AugmentationConfig();
    ModelList models;
    std::vector<IdentityGallery> galleries;
    std::vector<FaceSample> probes = {synth_face("x0", 0), synth_face("x1", 0)};
    for (int j = 0; j < 3; ++j) {
        auto model = std::make_shared<FrozenConvNet>(
            ModelInfo{"m" + std::to_string(j), 64, 2, "arcface", "toy"}, 300 + j);
        IdentityGallery gallery(model->name(), 64, GalleryMode::plain);
        gallery.insert("x0", model->embed(synth_face("x0", 1).image));
        gallery.insert("x1", model->embed(synth_face("x1", 1).image));
        models.push_back(model);
        galleries.push_back(std::move(gallery));
    }
    GalleryList gallery_ptrs;
    for (const auto& g : galleries) gallery_ptrs.push_back(&g);

    const std::vector<MaskCondition> masks = {
        MaskCondition::clean(),
        MaskCondition::textured("blue", standard_mask(StandardMaskColor::blue))};
    const Rng base(44);
    const TransferabilityMatrix matrix =
        transferability_matrix(masks, models, gallery_ptrs, probes, ctx, base);
    for (size_t mi = 0; mi < masks.size(); ++mi) {
        for (size_t ji = 0; ji < models.size(); ++ji) {
            Rng rng = base.substream("transfer/" + masks[mi].name + "/" + models[ji]->name());
            const SimilarityReport report =
                eval_similarity(masks[mi], probes, *models[ji], *gallery_ptrs[ji], ctx, rng);
            CHECK(matrix.mean_cosine[mi][ji] ==
                  doctest::Approx(report.mean(masks[mi].name)).epsilon(1e-12));
        }
    }
}

TEST_CASE("matrix CSV round trips") {
    TransferabilityMatrix matrix;
    matrix.mask_names = {"adv", "blue"};
    matrix.model_names = {"m0", "m1", "m2"};
    matrix.mean_cosine = {{0.1, 0.2, 0.3}, {0.4, 0.5, 0.6}};
    const auto path = (std::filesystem::temp_directory_path() / "advmask_matrix.csv").string();
    matrix.write_csv(path);
    const TransferabilityMatrix loaded = TransferabilityMatrix::read_csv(path);
    CHECK(loaded.mask_names == matrix.mask_names);
    CHECK(loaded.model_names == matrix.model_names);
    CHECK(loaded.mean_cosine[1][2] == doctest::Approx(0.6));
    std::remove(path.c_str());
}

TEST_CASE("threshold calibration: evenly spaced impostor scores") {
    std::vector<double> sims;
    for (int i = 0; i < 100; ++i) sims.push_back(i / 100.0);
    CHECK(calibrate_threshold_from_scores(sims, 0.01) == doctest::Approx(0.99));
    // With a looser target the threshold relaxes monotonically.
    CHECK(calibrate_threshold_from_scores(sims, 0.05) == doctest::Approx(0.95));
}

TEST_CASE("threshold calibration: degenerate single-valued distribution") {
    const std::vector<double> sims(64, 0.5);
    const double t = calibrate_threshold_from_scores(sims, 0.01);
    CHECK(t == std::nextafter(0.5, std::numeric_limits<double>::infinity()));
    CHECK(far_at(sims, t) == 0.0);
}

TEST_CASE("threshold calibration satisfies the FAR boundary property") {
    Rng rng(91);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = static_cast<int>(rng.uniform_int(3, 200));
        std::vector<double> sims(n);
        for (double& s : sims) s = rng.uniform(-1.0, 1.0);
        if (trial % 7 == 0) {
            // Inject duplicates to exercise tie handling.
            for (int i = 1; i < n; i += 2) sims[i] = sims[0];
        }
        const double target = rng.uniform(0.005, 0.5);
        const double t = calibrate_threshold_from_scores(sims, target);
        CHECK(far_at(sims, t) <= target);
        // The next lower candidate (largest observed value below t) fails.
        double prev = -std::numeric_limits<double>::infinity();
        for (double s : sims) {
            if (s < t) prev = std::max(prev, s);
        }
        if (std::isfinite(prev)) {
            CHECK(far_at(sims, prev) > target);
        }
    }
}

TEST_CASE("threshold is monotone in the FAR target") {
    Rng rng(92);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> sims(80);
        for (double& s : sims) s = rng.uniform(-1.0, 1.0);
        const double strict = calibrate_threshold_from_scores(sims, 0.02);
        const double loose = calibrate_threshold_from_scores(sims, 0.2);
        CHECK(strict >= loose);
    }
}

TEST_CASE("threshold calibration input validation") {
    CHECK_THROWS_AS(calibrate_threshold_from_scores({}, 0.01), EmptyProbeSet);
    CHECK_THROWS_AS(calibrate_threshold_from_scores({0.5}, 0.0), InvalidConfig);
    CHECK_THROWS_AS(calibrate_threshold_from_scores({0.5}, 1.0), InvalidConfig);
}

TEST_CASE("impostor scores pair every probe with every other gallery identity") {
    EvalSetup setup;
    IdentityGallery gallery("toy_a", 64, GalleryMode::plain);
    std::vector<FaceSample> probes;
    for (int i = 0; i < 3; ++i) {
        const std::string id = "imp" + std::to_string(i);
        gallery.insert(id, setup.model->embed(synth_face(id, 1).image));
        probes.push_back(synth_face(id, 0));
    }
    Rng rng(2);
    const auto scores =
        impostor_scores(*setup.model, gallery, probes, std::nullopt, setup.ctx, rng);
    // 3 probes x 2 non-matching gallery identities each.
    CHECK(scores.size() == 6);

    IdentityGallery solo("toy_a", 64, GalleryMode::plain);
    solo.insert("imp0", setup.model->embed(synth_face("imp0", 1).image));
    Rng rng2(2);
    CHECK_THROWS_AS(
        impostor_scores(*setup.model, solo, {probes[0]}, std::nullopt, setup.ctx, rng2),
        EmptyProbeSet);
}
