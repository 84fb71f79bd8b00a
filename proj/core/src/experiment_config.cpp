#include "advmask/experiment_config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "advmask/errors.hpp"

namespace advmask {

ExperimentConfig::ExperimentConfig() : doc_(std::make_unique<nlohmann::json>()) {}
ExperimentConfig::ExperimentConfig(const ExperimentConfig& other)
    : doc_(std::make_unique<nlohmann::json>(*other.doc_)) {}
ExperimentConfig::ExperimentConfig(ExperimentConfig&&) noexcept = default;
ExperimentConfig::~ExperimentConfig() = default;

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    ExperimentConfig config;
    try {
        *config.doc_ = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig(std::string("config is not valid JSON: ") + e.what());
    }
    if (!config.doc_->is_object()) throw InvalidConfig("config root must be an object");
    const int version = config.doc_->value("version", 0);
    if (version != kConfigVersion) {
        throw InvalidConfig("unsupported config version " + std::to_string(version) +
                            " (expected " + std::to_string(kConfigVersion) + ")");
    }
    return config;
}

std::uint64_t ExperimentConfig::seed() const { return doc_->value("seed", std::uint64_t{0}); }
std::string ExperimentConfig::out_dir() const { return doc_->value("out_dir", std::string("out")); }
int ExperimentConfig::workers() const { return doc_->value("workers", 1); }

std::string ExperimentConfig::asset_dir() const {
    if (const char* env = std::getenv(kAssetDirEnvVar); env && *env) return env;
    return doc_->value("asset_dir", std::string());
}

void ExperimentConfig::override_seed(std::uint64_t seed) { (*doc_)["seed"] = seed; }
void ExperimentConfig::override_out_dir(const std::string& out_dir) {
    (*doc_)["out_dir"] = out_dir;
}
void ExperimentConfig::override_workers(int workers) { (*doc_)["workers"] = workers; }

AugmentationConfig ExperimentConfig::augmentation() const {
    AugmentationConfig cfg;
    if (doc_->contains("augmentation")) {
        const nlohmann::json& a = doc_->at("augmentation");
        if (a.is_string() && a.get<std::string>() == "identity") {
            return AugmentationConfig::identity();
        }
        cfg.translation_min = a.value("translation_min", cfg.translation_min);
        cfg.translation_max = a.value("translation_max", cfg.translation_max);
        cfg.rotation_min_deg = a.value("rotation_min_deg", cfg.rotation_min_deg);
        cfg.rotation_max_deg = a.value("rotation_max_deg", cfg.rotation_max_deg);
        cfg.contrast_min = a.value("contrast_min", cfg.contrast_min);
        cfg.contrast_max = a.value("contrast_max", cfg.contrast_max);
        cfg.brightness_min = a.value("brightness_min", cfg.brightness_min);
        cfg.brightness_max = a.value("brightness_max", cfg.brightness_max);
        cfg.noise_sigma_min = a.value("noise_sigma_min", cfg.noise_sigma_min);
        cfg.noise_sigma_max = a.value("noise_sigma_max", cfg.noise_sigma_max);
    }
    cfg.validate();
    return cfg;
}

std::shared_ptr<const LandmarkBackend> ExperimentConfig::landmark_backend() const {
    std::string name = "template";
    if (doc_->contains("backends")) name = doc_->at("backends").value("landmark", name);
    return make_landmark_backend(name, asset_dir());
}

std::shared_ptr<const ReconstructionBackend> ExperimentConfig::reconstruction_backend() const {
    std::string name = "ellipsoid";
    if (doc_->contains("backends")) name = doc_->at("backends").value("reconstruction", name);
    return make_reconstruction_backend(name, asset_dir());
}

RenderContext ExperimentConfig::render_context() const {
    RenderContext ctx;
    ctx.reconstruction = reconstruction_backend();
    ctx.augmentation = augmentation();
    return ctx;
}

ModelRegistry ExperimentConfig::model_registry() const {
    if (!doc_->contains("models")) {
        throw InvalidConfig("config has no 'models' section");
    }
    const nlohmann::json& m = doc_->at("models");
    if (m.contains("manifest")) {
        return ModelRegistry::from_manifest_file(m.at("manifest").get<std::string>(), asset_dir());
    }
    if (m.contains("inline")) {
        nlohmann::json manifest;
        manifest["version"] = 1;
        manifest["models"] = m.at("inline");
        return ModelRegistry::from_manifest_json(manifest.dump(), asset_dir());
    }
    throw InvalidConfig("models section needs 'manifest' or 'inline'");
}

DatasetSpec ExperimentConfig::dataset_spec() const {
    DatasetSpec spec;
    if (!doc_->contains("dataset")) return spec;
    const nlohmann::json& d = doc_->at("dataset");
    spec.kind = d.value("kind", spec.kind);
    spec.identities = d.value("identities", spec.identities);
    spec.images_per_identity = d.value("images_per_identity", spec.images_per_identity);
    spec.prefix = d.value("prefix", spec.prefix);
    spec.root = d.value("root", spec.root);
    spec.split_file = d.value("split", spec.split_file);
    return spec;
}

OptimizerConfig ExperimentConfig::optimizer_config() const {
    OptimizerConfig cfg;
    cfg.seed = seed();
    cfg.workers = workers();
    if (!doc_->contains("train")) return cfg;
    const nlohmann::json& t = doc_->at("train");
    cfg.lambda_tv = t.value("lambda_tv", cfg.lambda_tv);
    cfg.learning_rate = t.value("learning_rate", cfg.learning_rate);
    cfg.batch_size = t.value("batch_size", cfg.batch_size);
    cfg.max_iterations = t.value("max_iterations", cfg.max_iterations);
    if (t.contains("ensemble")) {
        cfg.ensemble = t.at("ensemble").get<std::vector<std::string>>();
    }
    const std::string mode = t.value("mode", std::string("universal"));
    if (mode == "universal") {
        cfg.mode = OptimizeMode::universal;
    } else if (mode == "targeted") {
        cfg.mode = OptimizeMode::targeted;
    } else {
        throw InvalidConfig("train.mode must be universal or targeted");
    }
    if (t.contains("plateau")) {
        const nlohmann::json& p = t.at("plateau");
        cfg.plateau_enabled = p.value("enabled", false);
        cfg.plateau_patience = p.value("patience", cfg.plateau_patience);
        cfg.plateau_min_delta = p.value("min_delta", cfg.plateau_min_delta);
    }
    return cfg;
}

PersistenceConfig ExperimentConfig::persistence_config() const {
    PersistenceConfig cfg;
    if (doc_->contains("simulate")) {
        const nlohmann::json& s = doc_->at("simulate");
        if (s.contains("persistence")) {
            const nlohmann::json& p = s.at("persistence");
            cfg.window = p.value("window", cfg.window);
            cfg.hits_required = p.value("hits_required", cfg.hits_required);
        }
    }
    cfg.validate();
    return cfg;
}

const nlohmann::json& ExperimentConfig::section(const std::string& name) const {
    if (!doc_->contains(name)) throw InvalidConfig("config has no '" + name + "' section");
    return doc_->at(name);
}

bool ExperimentConfig::has_section(const std::string& name) const {
    return doc_->contains(name);
}

std::string ExperimentConfig::snapshot_text() const { return doc_->dump(2) + "\n"; }

void ExperimentConfig::write_snapshot(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write config snapshot: " + path);
    out << snapshot_text();
}

}  // namespace advmask
