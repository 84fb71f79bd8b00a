#pragma once

#include <array>
#include <string>
#include <vector>

#include "advmask/image.hpp"

namespace advmask {

/// Input images are aligned face crops of this fixed size.
inline constexpr int kFaceSize = 112;

/// Aligned facial image with landmarks and an identity label.
struct FaceSample {
    Image image;  // 112 x 112 x 3 in [0,1]
    std::vector<Point2> landmarks;
    std::string identity;
    std::string source_path;  // file origin, or a synth:// pseudo-path

    void validate() const;
};

/// Canonical 5-point landmark template for 112x112 aligned crops
/// (left eye, right eye, nose tip, left mouth corner, right mouth corner).
const std::array<Point2, 5>& canonical_landmarks();

/// Deterministic synthetic face: geometry pinned to the canonical template,
/// appearance (skin tone, hair, iris, forehead texture) derived from the
/// identity key, small photometric jitter per variant index.
FaceSample synth_face(const std::string& identity, int variant);

}  // namespace advmask
