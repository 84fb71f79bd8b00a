#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "advmask/errors.hpp"
#include "advmask/face.hpp"
#include "advmask/landmarks.hpp"

using namespace advmask;

TEST_CASE("template backend returns the generator's landmark set exactly") {
    const FaceSample face = synth_face("alice", 0);
    const TemplateLandmarkBackend backend;
    const std::vector<Point2> detected = detect_landmarks(face.image, backend);
    REQUIRE(detected.size() == face.landmarks.size());
    for (size_t i = 0; i < detected.size(); ++i) {
        CHECK(detected[i] == face.landmarks[i]);
    }
}

TEST_CASE("detection is deterministic per image") {
    const FaceSample face = synth_face("bob", 2);
    const TemplateLandmarkBackend backend;
    const auto a = detect_landmarks(face.image, backend);
    const auto b = detect_landmarks(face.image, backend);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("detect_landmarks validates the input image shape") {
    const TemplateLandmarkBackend backend;
    CHECK_THROWS_AS(detect_landmarks(Image(50, 50, 3), backend), ShapeMismatch);
    CHECK_THROWS_AS(detect_landmarks(Image(112, 112, 1), backend), ShapeMismatch);
}

TEST_CASE("annotation backend: asset lifecycle") {
    const auto dir = std::filesystem::temp_directory_path();
    const std::string path = (dir / "advmask_landmarks.json").string();

    SUBCASE("missing asset file raises BackendUnavailable") {
        CHECK_THROWS_AS(AnnotationLandmarkBackend("/nonexistent/landmarks.json"),
                        BackendUnavailable);
    }

    SUBCASE("annotated image resolves, unknown image raises NoFaceFound") {
        const FaceSample face = synth_face("carol", 0);
        const std::string key = hash_hex(content_hash(face.image));
        {
            std::ofstream out(path);
            out << "{\"count\":5,\"entries\":{\"" << key
                << "\":[[38.3,51.7],[73.5,51.5],[56.0,71.7],[41.5,92.4],[70.7,92.2]]}}";
        }
        const AnnotationLandmarkBackend backend(path);
        CHECK(backend.count() == 5);
        const auto points = detect_landmarks(face.image, backend);
        CHECK(points.size() == 5);
        CHECK(points[0].x == doctest::Approx(38.3));

        const FaceSample other = synth_face("dave", 0);
        CHECK_THROWS_AS(detect_landmarks(other.image, backend), NoFaceFound);
        std::remove(path.c_str());
    }

    SUBCASE("malformed asset raises BackendUnavailable") {
        {
            std::ofstream out(path);
            out << "{\"count\":5}";
        }
        CHECK_THROWS_AS(AnnotationLandmarkBackend{path}, BackendUnavailable);
        std::remove(path.c_str());
    }
}

TEST_CASE("backend factory resolves names") {
    CHECK(make_landmark_backend("template", "")->count() == 5);
    CHECK_THROWS_AS(make_landmark_backend("mtcnn", ""), InvalidConfig);
    CHECK_THROWS_AS(make_landmark_backend("annotation", "/nonexistent"), BackendUnavailable);
}
