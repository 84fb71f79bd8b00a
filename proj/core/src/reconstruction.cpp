#include "advmask/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "advmask/errors.hpp"
#include "advmask/face.hpp"

namespace advmask {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

std::optional<UvCoord> UVCorrespondence::map_point(const Point2& p) const {
    const int x0 = static_cast<int>(std::floor(p.x));
    const int y0 = static_cast<int>(std::floor(p.y));
    double wsum = 0.0, usum = 0.0, vsum = 0.0;
    double best_d2 = 1e300;
    UvCoord nearest{};
    bool any = false;
    for (int dy = 0; dy <= 1; ++dy) {
        for (int dx = 0; dx <= 1; ++dx) {
            const int xx = x0 + dx, yy = y0 + dy;
            if (xx < 0 || xx >= valid_mask.width || yy < 0 || yy >= valid_mask.height) continue;
            if (!valid_at(xx, yy)) continue;
            const double wx = dx == 0 ? 1.0 - (p.x - x0) : p.x - x0;
            const double wy = dy == 0 ? 1.0 - (p.y - y0) : p.y - y0;
            const double w = wx * wy;
            usum += w * face_to_uv.at(yy, xx, 0);
            vsum += w * face_to_uv.at(yy, xx, 1);
            wsum += w;
            const double d2 = (xx - p.x) * (xx - p.x) + (yy - p.y) * (yy - p.y);
            if (d2 < best_d2) {
                best_d2 = d2;
                nearest = {face_to_uv.at(yy, xx, 0), face_to_uv.at(yy, xx, 1)};
            }
            any = true;
        }
    }
    if (!any) return std::nullopt;
    if (wsum < 1e-12) return nearest;
    return UvCoord{usum / wsum, vsum / wsum};
}

std::optional<Point2> UVCorrespondence::unmap(const UvCoord& uv) const {
    const int r = uv_raster();
    const double gx = uv.u * (r - 1);
    const double gy = uv.v * (r - 1);
    const int x0 = static_cast<int>(std::floor(gx));
    const int y0 = static_cast<int>(std::floor(gy));
    double wsum = 0.0, xsum = 0.0, ysum = 0.0;
    bool any = false;
    for (int dy = 0; dy <= 1; ++dy) {
        for (int dx = 0; dx <= 1; ++dx) {
            const int xx = x0 + dx, yy = y0 + dy;
            if (xx < 0 || xx >= r || yy < 0 || yy >= r) continue;
            if (uv_valid.at(yy, xx, 0) == 0.0) continue;
            const double wx = dx == 0 ? 1.0 - (gx - x0) : gx - x0;
            const double wy = dy == 0 ? 1.0 - (gy - y0) : gy - y0;
            const double w = wx * wy;
            xsum += w * uv_to_face.at(yy, xx, 0);
            ysum += w * uv_to_face.at(yy, xx, 1);
            wsum += w;
            any = true;
        }
    }
    if (any && wsum > 1e-12) return Point2{xsum / wsum, ysum / wsum};
    // Boundary fallback: nearest valid cell in a widening window.
    for (int radius = 1; radius <= 4; ++radius) {
        double best_d2 = 1e300;
        Point2 best{};
        bool found = false;
        for (int yy = y0 - radius; yy <= y0 + 1 + radius; ++yy) {
            for (int xx = x0 - radius; xx <= x0 + 1 + radius; ++xx) {
                if (xx < 0 || xx >= r || yy < 0 || yy >= r) continue;
                if (uv_valid.at(yy, xx, 0) == 0.0) continue;
                const double d2 = (xx - gx) * (xx - gx) + (yy - gy) * (yy - gy);
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = {uv_to_face.at(yy, xx, 0), uv_to_face.at(yy, xx, 1)};
                    found = true;
                }
            }
        }
        if (found) return best;
    }
    return std::nullopt;
}

int UVCorrespondence::visible_count() const {
    int n = 0;
    for (double v : valid_mask.data) n += v != 0.0 ? 1 : 0;
    return n;
}

UVCorrespondence reconstruct_uv(const Image& image, const std::vector<Point2>& landmarks,
                                const ReconstructionBackend& backend) {
    if (image.channels != 3) throw ShapeMismatch("reconstruct_uv: image must have 3 channels");
    if (landmarks.size() < 5) throw InvalidConfig("reconstruct_uv: need at least 5 landmarks");
    for (const Point2& p : landmarks) {
        if (p.x < 0.0 || p.x > image.width - 1 || p.y < 0.0 || p.y > image.height - 1) {
            throw InvalidConfig("reconstruct_uv: landmark outside image");
        }
    }
    UVCorrespondence uv = backend.reconstruct(image, landmarks);
    if (uv.visible_count() == 0) {
        throw ReconstructionFailed("backend '" + backend.name() + "' produced an empty visible region");
    }
    return uv;
}

const std::string& EllipsoidBackend::name() const {
    static const std::string n = "ellipsoid";
    return n;
}

EllipsoidBackend::Fit EllipsoidBackend::fit_from_landmarks(const std::vector<Point2>& lm) {
    const Point2 le = lm[0], re = lm[1], ml = lm[3], mr = lm[4];
    const Point2 eye_mid{0.5 * (le.x + re.x), 0.5 * (le.y + re.y)};
    const Point2 mouth_mid{0.5 * (ml.x + mr.x), 0.5 * (ml.y + mr.y)};
    const double iod = std::hypot(re.x - le.x, re.y - le.y);
    const double vspan = std::hypot(mouth_mid.x - eye_mid.x, mouth_mid.y - eye_mid.y);
    Fit fit{};
    fit.cx = 0.5 * (eye_mid.x + mouth_mid.x);
    fit.cy = eye_mid.y + 0.45 * iod;
    fit.rx = 1.30 * iod;
    fit.ry = 1.10 * vspan;
    return fit;
}

std::optional<UvCoord> EllipsoidBackend::project(const Fit& fit, double x, double y) {
    const double X = (x - fit.cx) / fit.rx;
    const double Y = (y - fit.cy) / fit.ry;
    if (X * X + Y * Y > 1.0) return std::nullopt;
    const double psi = std::asin(std::clamp(Y, -1.0, 1.0));
    const double cos_psi = std::sqrt(std::max(0.0, 1.0 - Y * Y));
    const double sin_phi = cos_psi < 1e-12 ? 0.0 : std::clamp(X / cos_psi, -1.0, 1.0);
    const double phi = std::asin(sin_phi);
    return UvCoord{0.5 + phi / kPi, 0.5 + psi / kPi};
}

Point2 EllipsoidBackend::unproject(const Fit& fit, const UvCoord& uv) {
    const double phi = (uv.u - 0.5) * kPi;
    const double psi = (uv.v - 0.5) * kPi;
    return Point2{fit.cx + fit.rx * std::cos(psi) * std::sin(phi),
                  fit.cy + fit.ry * std::sin(psi)};
}

UVCorrespondence EllipsoidBackend::reconstruct(const Image& image,
                                               const std::vector<Point2>& landmarks) const {
    const Fit fit = fit_from_landmarks(landmarks);
    if (!(fit.rx > 1.0) || !(fit.ry > 1.0)) {
        throw ReconstructionFailed("ellipsoid fit degenerate: landmark geometry collapsed");
    }
    UVCorrespondence uv;
    uv.face_to_uv = Image(image.height, image.width, 2);
    uv.valid_mask = Image(image.height, image.width, 1);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            if (auto coord = project(fit, x, y)) {
                uv.face_to_uv.at(y, x, 0) = coord->u;
                uv.face_to_uv.at(y, x, 1) = coord->v;
                uv.valid_mask.at(y, x, 0) = 1.0;
            }
        }
    }
    const int r = uv_raster_;
    uv.uv_to_face = Image(r, r, 2);
    uv.uv_valid = Image(r, r, 1);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
            const Point2 p = unproject(fit, {static_cast<double>(j) / (r - 1),
                                             static_cast<double>(i) / (r - 1)});
            if (p.x >= 0.0 && p.x <= image.width - 1 && p.y >= 0.0 && p.y <= image.height - 1) {
                uv.uv_to_face.at(i, j, 0) = p.x;
                uv.uv_to_face.at(i, j, 1) = p.y;
                uv.uv_valid.at(i, j, 0) = 1.0;
            }
        }
    }
    return uv;
}

const std::string& PositionMapAssetBackend::name() const {
    static const std::string n = "position_map";
    return n;
}

namespace {

constexpr char kUvMapMagic[8] = {'A', 'M', 'U', 'V', 'M', 'A', 'P', '1'};

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

}  // namespace

void PositionMapAssetBackend::write_asset(
    const std::string& path, const std::vector<std::pair<std::uint64_t, Image>>& maps) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write position map asset: " + path);
    out.write(kUvMapMagic, sizeof(kUvMapMagic));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(maps.size()));
    for (const auto& [hash, fwd] : maps) {
        if (fwd.channels != 3) throw ShapeMismatch("position map must be H x W x 3 (u, v, valid)");
        write_pod<std::uint64_t>(out, hash);
        write_pod<std::uint16_t>(out, static_cast<std::uint16_t>(fwd.height));
        write_pod<std::uint16_t>(out, static_cast<std::uint16_t>(fwd.width));
        for (double v : fwd.data) write_pod<float>(out, static_cast<float>(v));
    }
}

PositionMapAssetBackend::PositionMapAssetBackend(const std::string& asset_path, int uv_raster)
    : uv_raster_(uv_raster) {
    std::ifstream in(asset_path, std::ios::binary);
    if (!in) throw BackendUnavailable("position map asset not found: " + asset_path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kUvMapMagic, sizeof(magic)) != 0) {
        throw BackendUnavailable("bad magic in position map asset: " + asset_path);
    }
    const auto count = read_pod<std::uint32_t>(in);
    for (std::uint32_t k = 0; k < count; ++k) {
        const auto hash = read_pod<std::uint64_t>(in);
        const int h = read_pod<std::uint16_t>(in);
        const int w = read_pod<std::uint16_t>(in);
        Image fwd(h, w, 3);
        for (double& v : fwd.data) v = read_pod<float>(in);
        if (!in) throw BackendUnavailable("truncated position map asset: " + asset_path);
        entries_[hash] = Entry{std::move(fwd)};
    }
}

UVCorrespondence PositionMapAssetBackend::reconstruct(const Image& image,
                                                      const std::vector<Point2>&) const {
    auto it = entries_.find(content_hash(image));
    if (it == entries_.end()) {
        throw ReconstructionFailed("no position map asset entry for this image");
    }
    const Image& fwd = it->second.forward;
    if (fwd.height != image.height || fwd.width != image.width) {
        throw ReconstructionFailed("position map asset entry has mismatched dimensions");
    }
    UVCorrespondence uv;
    uv.face_to_uv = Image(image.height, image.width, 2);
    uv.valid_mask = Image(image.height, image.width, 1);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            if (fwd.at(y, x, 2) != 0.0) {
                uv.face_to_uv.at(y, x, 0) = std::clamp(fwd.at(y, x, 0), 0.0, 1.0);
                uv.face_to_uv.at(y, x, 1) = std::clamp(fwd.at(y, x, 1), 0.0, 1.0);
                uv.valid_mask.at(y, x, 0) = 1.0;
            }
        }
    }
    // Build the inverse raster by splatting forward samples, then filling
    // holes from assigned neighbors. Keeps the <=1 px round-trip contract as
    // long as the source map is reasonably dense.
    const int r = uv_raster_;
    uv.uv_to_face = Image(r, r, 2);
    uv.uv_valid = Image(r, r, 1);
    Image best_d2(r, r, 1, 1e300);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            if (uv.valid_mask.at(y, x, 0) == 0.0) continue;
            const double gx = uv.face_to_uv.at(y, x, 0) * (r - 1);
            const double gy = uv.face_to_uv.at(y, x, 1) * (r - 1);
            const int cj = static_cast<int>(std::lround(gx));
            const int ci = static_cast<int>(std::lround(gy));
            if (ci < 0 || ci >= r || cj < 0 || cj >= r) continue;
            const double d2 = (gx - cj) * (gx - cj) + (gy - ci) * (gy - ci);
            if (d2 < best_d2.at(ci, cj, 0)) {
                best_d2.at(ci, cj, 0) = d2;
                uv.uv_to_face.at(ci, cj, 0) = x;
                uv.uv_to_face.at(ci, cj, 1) = y;
                uv.uv_valid.at(ci, cj, 0) = 1.0;
            }
        }
    }
    for (int pass = 0; pass < 2; ++pass) {
        Image next_valid = uv.uv_valid;
        Image next_map = uv.uv_to_face;
        for (int i = 0; i < r; ++i) {
            for (int j = 0; j < r; ++j) {
                if (uv.uv_valid.at(i, j, 0) != 0.0) continue;
                double sx = 0.0, sy = 0.0;
                int n = 0;
                for (int di = -1; di <= 1; ++di) {
                    for (int dj = -1; dj <= 1; ++dj) {
                        const int ii = i + di, jj = j + dj;
                        if (ii < 0 || ii >= r || jj < 0 || jj >= r) continue;
                        if (uv.uv_valid.at(ii, jj, 0) == 0.0) continue;
                        sx += uv.uv_to_face.at(ii, jj, 0);
                        sy += uv.uv_to_face.at(ii, jj, 1);
                        ++n;
                    }
                }
                if (n >= 3) {
                    next_map.at(i, j, 0) = sx / n;
                    next_map.at(i, j, 1) = sy / n;
                    next_valid.at(i, j, 0) = 1.0;
                }
            }
        }
        uv.uv_valid = std::move(next_valid);
        uv.uv_to_face = std::move(next_map);
    }
    return uv;
}

std::shared_ptr<const ReconstructionBackend> make_reconstruction_backend(
    const std::string& name, const std::string& asset_dir) {
    if (name == "ellipsoid") return std::make_shared<EllipsoidBackend>();
    if (name == "position_map") {
        const auto path = std::filesystem::path(asset_dir) / "position_maps.bin";
        return std::make_shared<PositionMapAssetBackend>(path.string());
    }
    throw InvalidConfig("unknown reconstruction backend: " + name);
}

}  // namespace advmask
