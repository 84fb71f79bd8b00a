#include "advmask/landmarks.hpp"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "advmask/errors.hpp"
#include "advmask/face.hpp"

namespace advmask {

std::vector<Point2> detect_landmarks(const Image& image, const LandmarkBackend& backend) {
    if (image.height != kFaceSize || image.width != kFaceSize || image.channels != 3) {
        throw ShapeMismatch("detect_landmarks: image must be 112x112x3");
    }
    std::vector<Point2> points = backend.detect(image);
    if (static_cast<int>(points.size()) != backend.count()) {
        throw NoFaceFound("backend '" + backend.name() + "' returned wrong point count");
    }
    for (const Point2& p : points) {
        if (p.x < 0.0 || p.x > image.width - 1 || p.y < 0.0 || p.y > image.height - 1) {
            throw NoFaceFound("backend '" + backend.name() + "' returned out-of-bounds point");
        }
    }
    return points;
}

const std::string& TemplateLandmarkBackend::name() const {
    static const std::string n = "template";
    return n;
}

std::vector<Point2> TemplateLandmarkBackend::detect(const Image&) const {
    const auto& lm = canonical_landmarks();
    return std::vector<Point2>(lm.begin(), lm.end());
}

AnnotationLandmarkBackend::AnnotationLandmarkBackend(const std::string& annotation_json_path) {
    std::ifstream in(annotation_json_path);
    if (!in) {
        throw BackendUnavailable("landmark annotation asset not found: " + annotation_json_path);
    }
    nlohmann::json doc;
    try {
        in >> doc;
        count_ = doc.at("count").get<int>();
        for (const auto& [key, value] : doc.at("entries").items()) {
            std::vector<Point2> pts;
            for (const auto& p : value) {
                pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
            }
            entries_[key] = std::move(pts);
        }
    } catch (const nlohmann::json::exception& e) {
        throw BackendUnavailable("malformed landmark annotation asset: " + std::string(e.what()));
    }
    if (count_ < 5) {
        throw BackendUnavailable("annotation asset must provide at least 5 points per face");
    }
}

const std::string& AnnotationLandmarkBackend::name() const {
    static const std::string n = "annotation";
    return n;
}

std::vector<Point2> AnnotationLandmarkBackend::detect(const Image& image) const {
    const std::string key = hash_hex(content_hash(image));
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw NoFaceFound("no landmark annotation for image " + key);
    }
    return it->second;
}

std::shared_ptr<const LandmarkBackend> make_landmark_backend(const std::string& name,
                                                             const std::string& asset_dir) {
    if (name == "template") return std::make_shared<TemplateLandmarkBackend>();
    if (name == "annotation") {
        const auto path = std::filesystem::path(asset_dir) / "landmarks.json";
        return std::make_shared<AnnotationLandmarkBackend>(path.string());
    }
    throw InvalidConfig("unknown landmark backend: " + name);
}

}  // namespace advmask
