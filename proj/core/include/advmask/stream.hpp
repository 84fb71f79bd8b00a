#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "advmask/embedding.hpp"
#include "advmask/face.hpp"
#include "advmask/gallery.hpp"
#include "advmask/landmarks.hpp"

namespace advmask {

/// One per-frame record of the simulated verification pipeline.
struct VerificationEvent {
    int frame_index = 0;
    bool detected = false;
    std::optional<std::string> candidate_identity;
    std::optional<double> similarity;
    bool recognized = false;  // implies detected
};

/// Sliding-window identification rule: identified when some window of
/// `window` evaluated frames contains at least `hits_required` recognized
/// frames.
struct PersistenceConfig {
    int window = 10;
    int hits_required = 7;

    void validate() const;
};

/// Face detector abstraction for the stream simulator. Returns the aligned
/// crop plus landmarks, or nothing when no face is present.
class FrameDetector {
public:
    virtual ~FrameDetector() = default;
    virtual const std::string& name() const = 0;
    virtual std::optional<FaceSample> detect(const Image& frame) const = 0;
};

/// Synthetic detector for pre-cropped streams: any non-constant 112x112x3
/// frame counts as a face, with template landmarks attached. Blank (constant)
/// frames and other shapes yield no detection.
class PassThroughDetector : public FrameDetector {
public:
    const std::string& name() const override;
    std::optional<FaceSample> detect(const Image& frame) const override;
};

/// Asset-backed detector: a frame is a face iff the landmark annotation
/// asset knows its content hash.
class AnnotationDetector : public FrameDetector {
public:
    explicit AnnotationDetector(std::shared_ptr<const LandmarkBackend> landmarks);
    const std::string& name() const override;
    std::optional<FaceSample> detect(const Image& frame) const override;

private:
    std::shared_ptr<const LandmarkBackend> landmarks_;
};

/// How "recognized" is decided. The default additionally requires the
/// best-scoring candidate to be the subject; the alternative only requires
/// the subject's own score to pass the threshold.
enum class RecognitionRule { argmax_correct, true_identity_threshold };

/// Runs detect -> embed -> best-candidate verification frame by frame.
/// Detector failures mark the frame undetected and never abort the stream.
std::vector<VerificationEvent> simulate_stream(const std::vector<Image>& frames,
                                               const FrameDetector& detector,
                                               const EmbeddingModel& model,
                                               const IdentityGallery& gallery, double threshold,
                                               const std::string& subject_identity,
                                               RecognitionRule rule = RecognitionRule::argmax_correct);

/// |recognized frames| / |detected frames|; throws NoDetections when no
/// frame was detected.
double recognition_rate(const std::vector<VerificationEvent>& events);

/// Windows slide over detected frames only; streams shorter than the window
/// are evaluated as a single window.
bool persistence_detection(const std::vector<VerificationEvent>& events,
                           const PersistenceConfig& config);

void write_events_csv(const std::vector<VerificationEvent>& events, const std::string& path);

}  // namespace advmask
