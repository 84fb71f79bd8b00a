#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "advmask/image.hpp"

namespace advmask {

/// Landmark detector abstraction. Backends are immutable after load and
/// deterministic per image. The first five points always follow the
/// canonical order: left eye, right eye, nose tip, mouth left, mouth right.
class LandmarkBackend {
public:
    virtual ~LandmarkBackend() = default;
    virtual const std::string& name() const = 0;
    virtual int count() const = 0;
    virtual std::vector<Point2> detect(const Image& image) const = 0;
};

/// Validates contracts around backend.detect: 112x112x3 input, exactly
/// backend.count() points, all inside image bounds.
std::vector<Point2> detect_landmarks(const Image& image, const LandmarkBackend& backend);

/// Synthetic backend for aligned crops: every face is template-aligned by
/// construction, so detection returns the canonical 5-point template.
class TemplateLandmarkBackend : public LandmarkBackend {
public:
    const std::string& name() const override;
    int count() const override { return 5; }
    std::vector<Point2> detect(const Image& image) const override;
};

/// Asset-backed detector: consumes landmark annotations precomputed by a
/// pretrained detector, keyed by image content hash. Construction throws
/// BackendUnavailable when the annotation asset is absent; lookups of
/// unannotated images throw NoFaceFound.
class AnnotationLandmarkBackend : public LandmarkBackend {
public:
    explicit AnnotationLandmarkBackend(const std::string& annotation_json_path);
    const std::string& name() const override;
    int count() const override { return count_; }
    std::vector<Point2> detect(const Image& image) const override;

private:
    int count_ = 0;
    std::map<std::string, std::vector<Point2>> entries_;
};

/// Backend selection by name: "template" or "annotation". The annotation
/// backend resolves its asset as <asset_dir>/landmarks.json.
std::shared_ptr<const LandmarkBackend> make_landmark_backend(const std::string& name,
                                                             const std::string& asset_dir);

}  // namespace advmask
