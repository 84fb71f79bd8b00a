#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "advmask/losses.hpp"
#include "advmask/mask_texture.hpp"

namespace advmask {

enum class OptimizeMode { universal, targeted };

struct OptimizerConfig {
    double lambda_tv = 0.1;
    double learning_rate = 1e-2;
    int batch_size = 32;
    int max_iterations = 1000;
    std::uint64_t seed = 0;
    std::vector<std::string> ensemble;
    OptimizeMode mode = OptimizeMode::universal;

    // Adam moments.
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;

    // Optional plateau stop on the similarity term.
    bool plateau_enabled = false;
    int plateau_patience = 50;
    double plateau_min_delta = 1e-4;

    int workers = 1;

    void validate() const;
};

struct HistoryRecord {
    int iteration = 0;
    double sim_loss = 0.0;
    double tv_loss = 0.0;
    double total_loss = 0.0;  // sim_loss + lambda_tv * tv_loss
    double seconds = 0.0;     // wall time, excluded from determinism contracts
};

struct TrainingHistory {
    std::vector<HistoryRecord> records;
    OptimizerConfig config;

    void write_csv(const std::string& path) const;
};

/// Iterative universal mask optimization: per iteration, a random batch is
/// drawn, the total objective and its gradient are evaluated under a fresh
/// augmentation draw, and the pixels take one Adam step followed by a [0,1]
/// projection. Deterministic per (config, seed, dataset).
std::pair<MaskTexture, TrainingHistory> optimize_universal(
    const MaskTexture& initial_mask, const std::vector<FaceSample>& dataset,
    const ModelList& models, const GalleryList& galleries, const OptimizerConfig& config,
    const RenderContext& ctx);

/// Same loop restricted to images of a single identity (the tailor-made
/// lower-bound attack). Throws MixedIdentities when labels disagree.
std::pair<MaskTexture, TrainingHistory> optimize_targeted(
    const MaskTexture& initial_mask, const std::vector<FaceSample>& single_identity_images,
    const ModelList& models, const GalleryList& galleries, const OptimizerConfig& config,
    const RenderContext& ctx);

}  // namespace advmask
