#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "advmask/embedding.hpp"

namespace advmask {

/// One manifest row: either a seeded toy builder or a weight-file asset.
struct ManifestEntry {
    std::string name;
    std::string kind;         // "toy" | "asset"
    int dim = 64;             // toy only
    int depth = 2;            // backbone depth
    std::string loss_family = "arcface";
    std::uint64_t seed = 0;   // toy only
    std::string path;         // asset only, resolved against asset_dir
    std::string checksum;     // asset only, fnv1a64 hex of the weight file
};

/// Loads, caches and lists embedding models. Loaded models are immutable;
/// handles stay valid after unload (shared ownership).
class ModelRegistry {
public:
    ModelRegistry() = default;

    void register_entry(const ManifestEntry& entry);

    /// Parses a JSON manifest ({"version":1,"models":[...]}); asset paths
    /// resolve against asset_dir when relative.
    static ModelRegistry from_manifest_file(const std::string& manifest_path,
                                            const std::string& asset_dir);
    static ModelRegistry from_manifest_json(const std::string& json_text,
                                            const std::string& asset_dir);

    /// Loads (or returns the cached) model. Throws UnknownModel for names
    /// absent from the manifest, AssetMissing when a weight file is absent,
    /// ChecksumMismatch when its content hash disagrees with the manifest.
    std::shared_ptr<const EmbeddingModel> load(const std::string& name);

    void unload(const std::string& name);

    /// Info for every currently loaded model, in load-name order.
    std::vector<ModelInfo> list() const;

    bool has_entry(const std::string& name) const { return entries_.count(name) != 0; }

private:
    std::map<std::string, ManifestEntry> entries_;
    std::map<std::string, std::shared_ptr<const EmbeddingModel>> loaded_;
    std::string asset_dir_;
};

/// fnv1a64 hex digest of a file's bytes (the manifest checksum format).
std::string file_checksum_hex(const std::string& path);

}  // namespace advmask
