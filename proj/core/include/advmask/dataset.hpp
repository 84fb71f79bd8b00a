#pragma once

#include <string>
#include <vector>

#include "advmask/face.hpp"
#include "advmask/gallery.hpp"
#include "advmask/landmarks.hpp"

namespace advmask {

/// Dataset source description (the config's "dataset" section).
/// kind == "synthetic": identities x images_per_identity generated faces.
/// kind == "directory": root/<identity>/<image>.png with landmarks detected
/// by the configured backend; an optional split file lists the identities
/// to keep (one per line, '#' comments).
struct DatasetSpec {
    std::string kind = "synthetic";
    int identities = 20;
    int images_per_identity = 5;
    std::string prefix = "id";
    std::string root;
    std::string split_file;
};

std::vector<FaceSample> synthetic_dataset(int identities, int images_per_identity,
                                          const std::string& prefix = "id");

std::vector<std::string> read_split_file(const std::string& path);

std::vector<FaceSample> load_directory_dataset(const std::string& root,
                                               const LandmarkBackend& landmarks,
                                               const std::string& split_file = "");

std::vector<FaceSample> load_dataset(const DatasetSpec& spec, const LandmarkBackend& landmarks);

ImagesByIdentity group_by_identity(const std::vector<FaceSample>& samples);

/// Deterministic fingerprint of a dataset (content hashes of every sample),
/// recorded in checkpoint metadata.
std::string dataset_fingerprint(const std::vector<FaceSample>& samples);

}  // namespace advmask
