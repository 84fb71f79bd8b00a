#include "advmask/stream.hpp"

#include <algorithm>
#include <fstream>

#include "advmask/errors.hpp"

namespace advmask {

void PersistenceConfig::validate() const {
    if (window <= 0) throw InvalidConfig("persistence window must be positive");
    if (hits_required <= 0) throw InvalidConfig("hits_required must be positive");
    if (hits_required > window) {
        throw InvalidConfig("hits_required must not exceed the sliding window");
    }
}

const std::string& PassThroughDetector::name() const {
    static const std::string n = "passthrough";
    return n;
}

std::optional<FaceSample> PassThroughDetector::detect(const Image& frame) const {
    if (frame.height != kFaceSize || frame.width != kFaceSize || frame.channels != 3) {
        return std::nullopt;
    }
    const auto [lo, hi] = std::minmax_element(frame.data.begin(), frame.data.end());
    if (*hi - *lo < 1e-9) return std::nullopt;  // blank frame
    FaceSample sample;
    sample.image = frame;
    const auto& lm = canonical_landmarks();
    sample.landmarks.assign(lm.begin(), lm.end());
    return sample;
}

AnnotationDetector::AnnotationDetector(std::shared_ptr<const LandmarkBackend> landmarks)
    : landmarks_(std::move(landmarks)) {
    if (!landmarks_) throw InvalidConfig("annotation detector needs a landmark backend");
}

const std::string& AnnotationDetector::name() const {
    static const std::string n = "annotation";
    return n;
}

std::optional<FaceSample> AnnotationDetector::detect(const Image& frame) const {
    if (frame.height != kFaceSize || frame.width != kFaceSize || frame.channels != 3) {
        return std::nullopt;
    }
    try {
        FaceSample sample;
        sample.image = frame;
        sample.landmarks = landmarks_->detect(frame);
        return sample;
    } catch (const NoFaceFound&) {
        return std::nullopt;
    }
}

std::vector<VerificationEvent> simulate_stream(const std::vector<Image>& frames,
                                               const FrameDetector& detector,
                                               const EmbeddingModel& model,
                                               const IdentityGallery& gallery, double threshold,
                                               const std::string& subject_identity,
                                               RecognitionRule rule) {
    if (frames.empty()) throw InvalidConfig("simulate_stream: empty frame sequence");
    if (gallery.size() == 0) throw InvalidConfig("simulate_stream: empty gallery");

    std::vector<VerificationEvent> events;
    events.reserve(frames.size());
    const std::vector<std::string> identities = gallery.identities();

    for (size_t f = 0; f < frames.size(); ++f) {
        VerificationEvent event;
        event.frame_index = static_cast<int>(f);
        std::optional<FaceSample> face;
        try {
            face = detector.detect(frames[f]);
        } catch (const Error&) {
            face.reset();  // per-frame failures never abort the stream
        }
        if (face) {
            event.detected = true;
            const std::vector<double> embedding = model.embed(face->image);
            std::string best_identity;
            double best_sim = -2.0;
            double subject_sim = -2.0;
            for (const std::string& identity : identities) {
                const double sim = cosine_similarity(embedding, gallery.entry(identity));
                if (sim > best_sim) {
                    best_sim = sim;
                    best_identity = identity;
                }
                if (identity == subject_identity) subject_sim = sim;
            }
            event.candidate_identity = best_identity;
            event.similarity = best_sim;
            if (rule == RecognitionRule::argmax_correct) {
                event.recognized = best_identity == subject_identity && best_sim >= threshold;
            } else {
                event.recognized = subject_sim > -2.0 && subject_sim >= threshold;
            }
        }
        events.push_back(std::move(event));
    }
    return events;
}

double recognition_rate(const std::vector<VerificationEvent>& events) {
    int detected = 0, recognized = 0;
    for (const VerificationEvent& e : events) {
        detected += e.detected ? 1 : 0;
        recognized += e.recognized ? 1 : 0;
    }
    if (detected == 0) throw NoDetections("recognition rate undefined without detected frames");
    return static_cast<double>(recognized) / static_cast<double>(detected);
}

bool persistence_detection(const std::vector<VerificationEvent>& events,
                           const PersistenceConfig& config) {
    config.validate();
    // Windows are over frames the FR system evaluated: detected frames only.
    std::vector<int> hits;
    for (const VerificationEvent& e : events) {
        if (e.detected) hits.push_back(e.recognized ? 1 : 0);
    }
    if (hits.empty()) return false;
    const int n = static_cast<int>(hits.size());
    const int window = std::min(config.window, n);
    int sum = 0;
    for (int i = 0; i < window; ++i) sum += hits[i];
    if (sum >= config.hits_required) return true;
    for (int i = window; i < n; ++i) {
        sum += hits[i] - hits[i - window];
        if (sum >= config.hits_required) return true;
    }
    return false;
}

void write_events_csv(const std::vector<VerificationEvent>& events, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write events csv: " + path);
    out << "frame_index,detected,candidate_identity,similarity,recognized\n";
    char line[256];
    for (const VerificationEvent& e : events) {
        std::snprintf(line, sizeof(line), "%d,%d,%s,%s,%d\n", e.frame_index, e.detected ? 1 : 0,
                      e.candidate_identity ? e.candidate_identity->c_str() : "",
                      e.similarity ? std::to_string(*e.similarity).c_str() : "",
                      e.recognized ? 1 : 0);
        out << line;
    }
}

}  // namespace advmask
