#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "advmask/image.hpp"

namespace advmask {

struct UvCoord {
    double u = 0.0;
    double v = 0.0;
};

/// Dense differentiable correspondence between image space and UV texture
/// space. The forward map stores a continuous (u, v) in [0,1]^2 per image
/// pixel; the inverse map is a raster over UV space holding continuous image
/// coordinates. Both carry validity planes. The correspondence is treated as
/// constant with respect to mask pixels.
struct UVCorrespondence {
    Image face_to_uv;     // H x W x 2 planes (u, v)
    Image valid_mask;     // H x W x 1, 0/1 visibility
    Image uv_to_face;     // R x R x 2 planes (x, y)
    Image uv_valid;       // R x R x 1

    int uv_raster() const { return uv_to_face.height; }
    bool valid_at(int x, int y) const { return valid_mask.at(y, x, 0) != 0.0; }
    UvCoord uv_at(int x, int y) const {
        return {face_to_uv.at(y, x, 0), face_to_uv.at(y, x, 1)};
    }

    /// Forward map at a continuous image point (bilinear over valid pixels).
    /// Empty when no valid pixel is near the query.
    std::optional<UvCoord> map_point(const Point2& image_point) const;

    /// Inverse map at a continuous UV point (bilinear over valid cells,
    /// nearest-valid fallback near the visibility boundary).
    std::optional<Point2> unmap(const UvCoord& uv) const;

    /// Count of visible pixels.
    int visible_count() const;
};

class ReconstructionBackend {
public:
    virtual ~ReconstructionBackend() = default;
    virtual const std::string& name() const = 0;
    virtual UVCorrespondence reconstruct(const Image& image,
                                         const std::vector<Point2>& landmarks) const = 0;
};

/// Contract wrapper: validates landmarks against the image, invokes the
/// backend, and throws ReconstructionFailed when the result is degenerate
/// (zero-area visible region).
UVCorrespondence reconstruct_uv(const Image& image, const std::vector<Point2>& landmarks,
                                const ReconstructionBackend& backend);

/// Deterministic parametric head model: a camera-facing half ellipsoid fitted
/// to the 5-point landmarks, parameterized by longitude/latitude. The whole
/// mapping is closed form, which makes it testable without model weights.
class EllipsoidBackend : public ReconstructionBackend {
public:
    explicit EllipsoidBackend(int uv_raster = 160) : uv_raster_(uv_raster) {}
    const std::string& name() const override;
    UVCorrespondence reconstruct(const Image& image,
                                 const std::vector<Point2>& landmarks) const override;

    struct Fit {
        double cx, cy, rx, ry;
    };
    static Fit fit_from_landmarks(const std::vector<Point2>& landmarks);
    /// Closed-form forward map for a fitted ellipsoid; empty outside the
    /// visible hemisphere. This is the oracle the raster is checked against.
    static std::optional<UvCoord> project(const Fit& fit, double x, double y);
    /// Closed-form inverse of project.
    static Point2 unproject(const Fit& fit, const UvCoord& uv);

private:
    int uv_raster_;
};

/// Asset-backed UV-position-map model: consumes dense forward maps exported
/// by a pretrained reconstruction network, keyed by image content hash.
/// Missing asset file -> BackendUnavailable; unmapped image -> ReconstructionFailed.
class PositionMapAssetBackend : public ReconstructionBackend {
public:
    explicit PositionMapAssetBackend(const std::string& asset_path, int uv_raster = 160);
    const std::string& name() const override;
    UVCorrespondence reconstruct(const Image& image,
                                 const std::vector<Point2>& landmarks) const override;

    /// Writes maps in the backend's binary format (test and export helper).
    static void write_asset(const std::string& path,
                            const std::vector<std::pair<std::uint64_t, Image>>& maps);

private:
    struct Entry {
        Image forward;  // H x W x 3 planes (u, v, valid)
    };
    std::map<std::uint64_t, Entry> entries_;
    int uv_raster_;
};

/// Backend selection by name: "ellipsoid" or "position_map". The asset
/// backend resolves <asset_dir>/position_maps.bin.
std::shared_ptr<const ReconstructionBackend> make_reconstruction_backend(
    const std::string& name, const std::string& asset_dir);

}  // namespace advmask
