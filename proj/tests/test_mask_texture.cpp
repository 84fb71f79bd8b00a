#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "advmask/errors.hpp"
#include "advmask/mask_texture.hpp"

using namespace advmask;

TEST_CASE("default support has spec dimensions and is binary") {
    const Image support = default_mask_support();
    CHECK(support.height == 60);
    CHECK(support.width == 112);
    CHECK(support.channels == 1);
    int ones = 0;
    for (double v : support.data) {
        CHECK((v == 0.0 || v == 1.0));
        ones += v == 1.0 ? 1 : 0;
    }
    // The silhouette covers a substantial part of the canvas but not all.
    CHECK(ones > 60 * 112 / 3);
    CHECK(ones < 60 * 112);
}

TEST_CASE("validate rejects broken invariants") {
    MaskTexture mask = standard_mask(StandardMaskColor::blue);
    CHECK_NOTHROW(mask.validate());

    MaskTexture bad_pixels = mask;
    bad_pixels.pixels.at(0, 0, 0) = 1.5;
    CHECK_THROWS_AS(bad_pixels.validate(), InvalidConfig);

    MaskTexture bad_support = mask;
    bad_support.support.at(0, 0, 0) = 0.5;
    CHECK_THROWS_AS(bad_support.validate(), InvalidConfig);

    MaskTexture mismatched = mask;
    mismatched.support = Image(10, 10, 1);
    CHECK_THROWS_AS(mismatched.validate(), ShapeMismatch);
}

TEST_CASE("standard masks carry the documented colors") {
    const MaskTexture blue = standard_mask(StandardMaskColor::blue);
    CHECK(blue.pixels.at(30, 56, 0) == doctest::Approx(0.30));
    CHECK(blue.pixels.at(30, 56, 1) == doctest::Approx(0.52));
    CHECK(blue.pixels.at(30, 56, 2) == doctest::Approx(0.71));
    const MaskTexture black = standard_mask(StandardMaskColor::black);
    CHECK(black.pixels.at(0, 0, 0) == doctest::Approx(0.05));
    const MaskTexture white = standard_mask(StandardMaskColor::white);
    CHECK(white.pixels.at(0, 0, 2) == doctest::Approx(0.95));
}

TEST_CASE("random mask is deterministic per seed and in range") {
    const Image support = default_mask_support();
    Rng a(3), b(3);
    const MaskTexture ma = random_mask(a, support);
    const MaskTexture mb = random_mask(b, support);
    CHECK(max_abs_diff(ma.pixels, mb.pixels) == 0.0);
    CHECK_NOTHROW(ma.validate());
}

TEST_CASE("texture save/load round trip is lossless after quantization") {
    MaskTexture mask = face_control_mask(/*male=*/true, default_mask_support());
    const auto dir = std::filesystem::temp_directory_path();
    const std::string tex = (dir / "advmask_tex.png").string();
    const std::string sup = (dir / "advmask_sup.png").string();
    save_mask_texture(mask, tex, sup);
    const MaskTexture loaded = load_mask_texture(tex, sup);
    CHECK(max_abs_diff(loaded.pixels, quantized_copy(mask.pixels)) == 0.0);
    CHECK(max_abs_diff(loaded.support, mask.support) == 0.0);
    std::remove(tex.c_str());
    std::remove(sup.c_str());
}

TEST_CASE("support_empty detects all-zero supports") {
    MaskTexture mask = make_uniform_mask(0.5, 0.5, 0.5, Image(10, 10, 1, 0.0));
    CHECK(mask.support_empty());
    mask.support.at(5, 5, 0) = 1.0;
    CHECK_FALSE(mask.support_empty());
}
