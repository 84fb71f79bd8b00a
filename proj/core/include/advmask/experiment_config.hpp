#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "advmask/augmentation.hpp"
#include "advmask/dataset.hpp"
#include "advmask/landmarks.hpp"
#include "advmask/optimizer.hpp"
#include "advmask/reconstruction.hpp"
#include "advmask/registry.hpp"
#include "advmask/render.hpp"
#include "advmask/stream.hpp"

namespace advmask {

inline constexpr int kConfigVersion = 1;
inline constexpr const char* kAssetDirEnvVar = "ADVMASK_ASSET_DIR";

/// Parsed experiment configuration (versioned JSON). Command-specific
/// sections are read lazily; shared sections (seed, backends, augmentation,
/// models, dataset) have typed accessors. CLI flags override seed/out/workers.
class ExperimentConfig {
public:
    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);

    ExperimentConfig(const ExperimentConfig&);
    ExperimentConfig& operator=(const ExperimentConfig&) = delete;
    ExperimentConfig(ExperimentConfig&&) noexcept;
    ~ExperimentConfig();

    std::uint64_t seed() const;
    std::string out_dir() const;
    int workers() const;
    /// ADVMASK_ASSET_DIR wins over the config's asset_dir field.
    std::string asset_dir() const;

    void override_seed(std::uint64_t seed);
    void override_out_dir(const std::string& out_dir);
    void override_workers(int workers);

    AugmentationConfig augmentation() const;
    std::shared_ptr<const LandmarkBackend> landmark_backend() const;
    std::shared_ptr<const ReconstructionBackend> reconstruction_backend() const;
    RenderContext render_context() const;
    ModelRegistry model_registry() const;
    DatasetSpec dataset_spec() const;
    OptimizerConfig optimizer_config() const;
    PersistenceConfig persistence_config() const;

    /// Raw access to a command section ("train", "eval", ...).
    const nlohmann::json& section(const std::string& name) const;
    bool has_section(const std::string& name) const;

    /// The resolved document (overrides applied); written as the snapshot.
    std::string snapshot_text() const;
    void write_snapshot(const std::string& path) const;

private:
    ExperimentConfig();
    std::unique_ptr<nlohmann::json> doc_;
};

}  // namespace advmask
