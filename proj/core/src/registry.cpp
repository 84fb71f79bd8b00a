#include "advmask/registry.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "advmask/errors.hpp"

namespace advmask {

std::string file_checksum_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw AssetMissing("cannot open file for checksum: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();
    return hash_hex(fnv1a64(bytes.data(), bytes.size()));
}

void ModelRegistry::register_entry(const ManifestEntry& entry) {
    if (entry.name.empty()) throw InvalidConfig("model manifest entry without a name");
    if (entry.kind != "toy" && entry.kind != "asset") {
        throw InvalidConfig("model kind must be 'toy' or 'asset': " + entry.name);
    }
    entries_[entry.name] = entry;
}

ModelRegistry ModelRegistry::from_manifest_file(const std::string& manifest_path,
                                                const std::string& asset_dir) {
    std::ifstream in(manifest_path);
    if (!in) throw AssetMissing("model manifest not found: " + manifest_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_manifest_json(buf.str(), asset_dir);
}

ModelRegistry ModelRegistry::from_manifest_json(const std::string& json_text,
                                                const std::string& asset_dir) {
    ModelRegistry registry;
    registry.asset_dir_ = asset_dir;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
        for (const auto& m : doc.at("models")) {
            ManifestEntry e;
            e.name = m.at("name").get<std::string>();
            e.kind = m.at("kind").get<std::string>();
            e.dim = m.value("dim", 64);
            e.depth = m.value("depth", 2);
            e.loss_family = m.value("loss", std::string("arcface"));
            e.seed = m.value("seed", std::uint64_t{0});
            e.path = m.value("path", std::string());
            e.checksum = m.value("checksum", std::string());
            registry.register_entry(e);
        }
    } catch (const nlohmann::json::exception& ex) {
        throw InvalidConfig(std::string("malformed model manifest: ") + ex.what());
    }
    return registry;
}

std::shared_ptr<const EmbeddingModel> ModelRegistry::load(const std::string& name) {
    auto loaded = loaded_.find(name);
    if (loaded != loaded_.end()) return loaded->second;

    auto it = entries_.find(name);
    if (it == entries_.end()) throw UnknownModel("model not in manifest: " + name);
    const ManifestEntry& e = it->second;

    std::shared_ptr<const EmbeddingModel> model;
    if (e.kind == "toy") {
        ModelInfo info{e.name, e.dim, e.depth, e.loss_family, "toy"};
        model = std::make_shared<FrozenConvNet>(info, e.seed);
    } else {
        std::filesystem::path path(e.path);
        if (path.is_relative() && !asset_dir_.empty()) {
            path = std::filesystem::path(asset_dir_) / path;
        }
        std::ifstream in(path, std::ios::binary);
        if (!in) throw AssetMissing("model weights not found: " + path.string());
        if (!e.checksum.empty()) {
            const std::string actual = file_checksum_hex(path.string());
            if (actual != e.checksum) {
                throw ChecksumMismatch("weights checksum mismatch for '" + name + "': expected " +
                                       e.checksum + ", got " + actual);
            }
        }
        auto net = FrozenConvNet::deserialize(in, e.name, "asset");
        // Manifest metadata wins over whatever the file claims.
        model = net;
    }
    loaded_[name] = model;
    return model;
}

void ModelRegistry::unload(const std::string& name) { loaded_.erase(name); }

std::vector<ModelInfo> ModelRegistry::list() const {
    std::vector<ModelInfo> out;
    out.reserve(loaded_.size());
    for (const auto& [name, model] : loaded_) out.push_back(model->info());
    return out;
}

}  // namespace advmask
