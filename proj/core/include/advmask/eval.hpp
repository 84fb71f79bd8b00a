#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "advmask/embedding.hpp"
#include "advmask/gallery.hpp"
#include "advmask/mask_texture.hpp"
#include "advmask/render.hpp"
#include "advmask/rng.hpp"

namespace advmask {

/// A probe condition: either the bare image ("clean") or a named texture
/// rendered onto the probe before embedding.
struct MaskCondition {
    std::string name;
    std::optional<MaskTexture> texture;

    static MaskCondition clean() { return {"clean", std::nullopt}; }
    static MaskCondition textured(std::string name, MaskTexture texture) {
        return {std::move(name), std::move(texture)};
    }
};

struct SimilarityRecord {
    std::string identity;
    std::string condition;
    std::string model;
    double cosine = 0.0;
};

struct SimilarityAggregate {
    int count = 0;
    double mean = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double min = 0.0;
    double max = 0.0;
};

/// Per-probe records plus per-condition aggregates (always recomputed from
/// the records, never cached independently).
struct SimilarityReport {
    std::vector<SimilarityRecord> records;

    SimilarityAggregate aggregate(const std::string& condition) const;
    std::vector<std::string> conditions() const;
    double mean(const std::string& condition) const;

    void append(const SimilarityReport& other);
    void write_csv(const std::string& path) const;
    static SimilarityReport read_csv(const std::string& path);
};

/// Scores every probe against its own gallery entry under one condition.
/// Augmentation parameters are drawn per probe from rng (sequential).
SimilarityReport eval_similarity(const MaskCondition& condition,
                                 const std::vector<FaceSample>& dataset,
                                 const EmbeddingModel& model, const IdentityGallery& gallery,
                                 const RenderContext& ctx, Rng& rng);

/// Mean-cosine grid: rows = mask conditions, columns = models.
struct TransferabilityMatrix {
    std::vector<std::string> mask_names;
    std::vector<std::string> model_names;
    std::vector<std::vector<double>> mean_cosine;  // [mask][model]

    void write_csv(const std::string& path) const;
    static TransferabilityMatrix read_csv(const std::string& path);
};

TransferabilityMatrix transferability_matrix(const std::vector<MaskCondition>& masks,
                                             const ModelList& models,
                                             const GalleryList& galleries,
                                             const std::vector<FaceSample>& dataset,
                                             const RenderContext& ctx, const Rng& base_rng);

/// Smallest candidate threshold whose false acceptance rate is within
/// far_target. Candidates are the observed similarity values plus the next
/// representable value above the maximum; ties snap to the stricter side.
double calibrate_threshold_from_scores(std::vector<double> impostor_similarities,
                                       double far_target);

/// All impostor pairings (gallery identity x probe of a different identity),
/// scored after rendering `impostor_mask` onto each probe when provided.
std::vector<double> impostor_scores(const EmbeddingModel& model, const IdentityGallery& gallery,
                                    const std::vector<FaceSample>& probes,
                                    const std::optional<MaskTexture>& impostor_mask,
                                    const RenderContext& ctx, Rng& rng);

double calibrate_threshold(const EmbeddingModel& model, const IdentityGallery& gallery,
                           const std::vector<FaceSample>& impostor_probe_set, double far_target,
                           const std::optional<MaskTexture>& impostor_mask,
                           const RenderContext& ctx, Rng& rng);

}  // namespace advmask
