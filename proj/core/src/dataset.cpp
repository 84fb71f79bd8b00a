#include "advmask/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "advmask/errors.hpp"
#include "advmask/png_io.hpp"

namespace advmask {

namespace fs = std::filesystem;

std::vector<FaceSample> synthetic_dataset(int identities, int images_per_identity,
                                          const std::string& prefix) {
    if (identities <= 0 || images_per_identity <= 0) {
        throw InvalidConfig("synthetic dataset needs positive counts");
    }
    std::vector<FaceSample> samples;
    samples.reserve(static_cast<size_t>(identities) * images_per_identity);
    for (int i = 0; i < identities; ++i) {
        char id[64];
        std::snprintf(id, sizeof(id), "%s%03d", prefix.c_str(), i);
        for (int v = 0; v < images_per_identity; ++v) {
            samples.push_back(synth_face(id, v));
        }
    }
    return samples;
}

std::vector<std::string> read_split_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open split file: " + path);
    std::vector<std::string> identities;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        identities.push_back(line);
    }
    return identities;
}

std::vector<FaceSample> load_directory_dataset(const std::string& root,
                                               const LandmarkBackend& landmarks,
                                               const std::string& split_file) {
    if (!fs::is_directory(root)) throw IoError("dataset root is not a directory: " + root);
    std::vector<std::string> keep;
    if (!split_file.empty()) keep = read_split_file(split_file);

    std::vector<std::string> identity_dirs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (!entry.is_directory()) continue;
        const std::string identity = entry.path().filename().string();
        if (!keep.empty() && std::find(keep.begin(), keep.end(), identity) == keep.end()) {
            continue;
        }
        identity_dirs.push_back(entry.path().string());
    }
    std::sort(identity_dirs.begin(), identity_dirs.end());

    std::vector<FaceSample> samples;
    for (const std::string& dir : identity_dirs) {
        std::vector<std::string> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".png") {
                files.push_back(entry.path().string());
            }
        }
        std::sort(files.begin(), files.end());
        for (const std::string& file : files) {
            FaceSample sample;
            sample.image = read_png(file);
            if (sample.image.channels == 1) {
                throw IoError("dataset image must be RGB: " + file);
            }
            if (sample.image.height != kFaceSize || sample.image.width != kFaceSize) {
                throw ShapeMismatch("dataset image must be 112x112: " + file);
            }
            sample.landmarks = detect_landmarks(sample.image, landmarks);
            sample.identity = fs::path(dir).filename().string();
            sample.source_path = file;
            samples.push_back(std::move(sample));
        }
    }
    if (samples.empty()) throw IoError("dataset is empty: " + root);
    return samples;
}

std::vector<FaceSample> load_dataset(const DatasetSpec& spec, const LandmarkBackend& landmarks) {
    if (spec.kind == "synthetic") {
        return synthetic_dataset(spec.identities, spec.images_per_identity, spec.prefix);
    }
    if (spec.kind == "directory") {
        return load_directory_dataset(spec.root, landmarks, spec.split_file);
    }
    throw InvalidConfig("unknown dataset kind: " + spec.kind);
}

ImagesByIdentity group_by_identity(const std::vector<FaceSample>& samples) {
    ImagesByIdentity grouped;
    for (const FaceSample& sample : samples) grouped[sample.identity].push_back(sample);
    return grouped;
}

std::string dataset_fingerprint(const std::vector<FaceSample>& samples) {
    std::uint64_t h = fnv1a64("dataset");
    for (const FaceSample& sample : samples) {
        const std::uint64_t c = content_hash(sample.image);
        h = fnv1a64(&c, sizeof(c), h);
        h = fnv1a64(sample.identity.data(), sample.identity.size(), h);
    }
    return hash_hex(h);
}

}  // namespace advmask
