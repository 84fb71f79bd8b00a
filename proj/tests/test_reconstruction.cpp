#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>

#include "advmask/errors.hpp"
#include "advmask/face.hpp"
#include "advmask/reconstruction.hpp"
#include "advmask/render.hpp"
#include "advmask/rng.hpp"

using namespace advmask;

namespace {

// Independent restatement of the half-ellipsoid longitude/latitude map used
// as the closed-form oracle: X = (x-cx)/rx, Y = (y-cy)/ry inside the unit
// disc; u = 1/2 + asin(X / sqrt(1-Y^2)) / pi, v = 1/2 + asin(Y) / pi.
std::optional<UvCoord> oracle_project(double cx, double cy, double rx, double ry, double x,
                                      double y) {
    const double X = (x - cx) / rx;
    const double Y = (y - cy) / ry;
    if (X * X + Y * Y > 1.0) return std::nullopt;
    const double cos_psi = std::sqrt(1.0 - Y * Y);
    const double sin_phi = cos_psi < 1e-12 ? 0.0 : X / cos_psi;
    return UvCoord{0.5 + std::asin(std::clamp(sin_phi, -1.0, 1.0)) / M_PI,
                   0.5 + std::asin(std::clamp(Y, -1.0, 1.0)) / M_PI};
}

UVCorrespondence reconstruct_synth(const std::string& identity = "probe") {
    const FaceSample face = synth_face(identity, 0);
    const EllipsoidBackend backend;
    return reconstruct_uv(face.image, face.landmarks, backend);
}

}  // namespace

TEST_CASE("ellipsoid backend matches the closed-form projection at probe pixels") {
    const FaceSample face = synth_face("probe", 0);
    const EllipsoidBackend backend;
    const UVCorrespondence uv = reconstruct_uv(face.image, face.landmarks, backend);
    const auto fit = EllipsoidBackend::fit_from_landmarks(face.landmarks);

    const int probes[5][2] = {{56, 70}, {40, 60}, {70, 80}, {56, 100}, {30, 75}};
    for (const auto& p : probes) {
        const int x = p[0], y = p[1];
        const auto expected = oracle_project(fit.cx, fit.cy, fit.rx, fit.ry, x, y);
        REQUIRE(expected.has_value());
        REQUIRE(uv.valid_at(x, y));
        // 0.5 px tolerance expressed in UV raster units.
        const double raster = uv.uv_raster() - 1.0;
        CHECK(std::fabs(uv.uv_at(x, y).u - expected->u) * raster < 0.5);
        CHECK(std::fabs(uv.uv_at(x, y).v - expected->v) * raster < 0.5);
    }
}

TEST_CASE("round trip of random visible pixels stays within one pixel") {
    const UVCorrespondence uv = reconstruct_synth();
    Rng rng(13);
    int checked = 0;
    while (checked < 100) {
        const int x = static_cast<int>(rng.uniform_int(0, 111));
        const int y = static_cast<int>(rng.uniform_int(0, 111));
        if (!uv.valid_at(x, y)) continue;
        const auto back = uv.unmap(uv.uv_at(x, y));
        REQUIRE(back.has_value());
        const double err = std::hypot(back->x - x, back->y - y);
        CHECK(err <= 1.0);
        ++checked;
    }
}

TEST_CASE("frontal face visibility covers the lower-face mask region") {
    const FaceSample face = synth_face("probe", 0);
    const UVCorrespondence uv = reconstruct_synth();
    // The chin/cheek/nose-bridge anchors must all be mappable: placement
    // succeeds and spans a non-degenerate quad in the lower half of UV space.
    const MaskPlacement placement = compute_mask_placement(face.landmarks, uv);
    CHECK(placement.u_min < placement.u_max);
    CHECK(placement.v_min < placement.v_max);
    CHECK(placement.v_min > 0.35);  // below the eyes in UV space
    // Mouth-region pixels are visible.
    CHECK(uv.valid_at(56, 92));
    CHECK(uv.valid_at(46, 92));
    CHECK(uv.valid_at(66, 92));
}

TEST_CASE("degenerate landmark geometry raises ReconstructionFailed") {
    const FaceSample face = synth_face("probe", 0);
    std::vector<Point2> collapsed(5, Point2{56.0, 56.0});
    const EllipsoidBackend backend;
    CHECK_THROWS_AS(reconstruct_uv(face.image, collapsed, backend), ReconstructionFailed);
}

TEST_CASE("all stored map coordinates stay inside their rasters") {
    const UVCorrespondence uv = reconstruct_synth("bounds");
    for (int y = 0; y < uv.valid_mask.height; ++y) {
        for (int x = 0; x < uv.valid_mask.width; ++x) {
            if (!uv.valid_at(x, y)) continue;
            const UvCoord c = uv.uv_at(x, y);
            CHECK(c.u >= 0.0);
            CHECK(c.u <= 1.0);
            CHECK(c.v >= 0.0);
            CHECK(c.v <= 1.0);
        }
    }
    const int r = uv.uv_raster();
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
            if (uv.uv_valid.at(i, j, 0) == 0.0) continue;
            CHECK(uv.uv_to_face.at(i, j, 0) >= 0.0);
            CHECK(uv.uv_to_face.at(i, j, 0) <= 111.0);
            CHECK(uv.uv_to_face.at(i, j, 1) >= 0.0);
            CHECK(uv.uv_to_face.at(i, j, 1) <= 111.0);
        }
    }
}

TEST_CASE("position map asset backend consumes exported forward maps") {
    const FaceSample face = synth_face("asset_face", 0);
    const EllipsoidBackend ellipsoid;
    const UVCorrespondence reference = reconstruct_uv(face.image, face.landmarks, ellipsoid);

    // Export the ellipsoid forward map as the asset payload.
    Image forward(112, 112, 3);
    for (int y = 0; y < 112; ++y) {
        for (int x = 0; x < 112; ++x) {
            forward.at(y, x, 0) = reference.face_to_uv.at(y, x, 0);
            forward.at(y, x, 1) = reference.face_to_uv.at(y, x, 1);
            forward.at(y, x, 2) = reference.valid_mask.at(y, x, 0);
        }
    }
    const auto path =
        (std::filesystem::temp_directory_path() / "advmask_position_maps.bin").string();
    PositionMapAssetBackend::write_asset(path, {{content_hash(face.image), forward}});

    const PositionMapAssetBackend backend(path);
    const UVCorrespondence uv = reconstruct_uv(face.image, face.landmarks, backend);
    CHECK(uv.visible_count() == reference.visible_count());

    // Forward map agrees with the source (float32 storage tolerance) and the
    // splatted inverse still satisfies the 1 px round-trip contract.
    Rng rng(4);
    int checked = 0;
    while (checked < 50) {
        const int x = static_cast<int>(rng.uniform_int(0, 111));
        const int y = static_cast<int>(rng.uniform_int(0, 111));
        if (!uv.valid_at(x, y)) continue;
        CHECK(std::fabs(uv.uv_at(x, y).u - reference.uv_at(x, y).u) < 1e-6);
        const auto back = uv.unmap(uv.uv_at(x, y));
        REQUIRE(back.has_value());
        CHECK(std::hypot(back->x - x, back->y - y) <= 1.0);
        ++checked;
    }

    // Unknown image content -> ReconstructionFailed.
    const FaceSample other = synth_face("other", 1);
    CHECK_THROWS_AS(reconstruct_uv(other.image, other.landmarks, backend), ReconstructionFailed);
    std::remove(path.c_str());

    CHECK_THROWS_AS(PositionMapAssetBackend("/nonexistent/maps.bin"), BackendUnavailable);
}
