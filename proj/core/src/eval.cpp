#include "advmask/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "advmask/errors.hpp"

namespace advmask {

namespace {

double percentile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return 0.0;
    const double pos = p * (sorted.size() - 1);
    const size_t lo = static_cast<size_t>(std::floor(pos));
    const size_t hi = static_cast<size_t>(std::ceil(pos));
    const double frac = pos - lo;
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

SimilarityAggregate SimilarityReport::aggregate(const std::string& condition) const {
    std::vector<double> values;
    for (const SimilarityRecord& r : records) {
        if (r.condition == condition) values.push_back(r.cosine);
    }
    SimilarityAggregate agg;
    agg.count = static_cast<int>(values.size());
    if (values.empty()) return agg;
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    agg.mean = sum / values.size();
    agg.median = percentile(values, 0.5);
    agg.q1 = percentile(values, 0.25);
    agg.q3 = percentile(values, 0.75);
    agg.min = values.front();
    agg.max = values.back();
    return agg;
}

std::vector<std::string> SimilarityReport::conditions() const {
    std::vector<std::string> out;
    for (const SimilarityRecord& r : records) {
        if (std::find(out.begin(), out.end(), r.condition) == out.end()) {
            out.push_back(r.condition);
        }
    }
    return out;
}

double SimilarityReport::mean(const std::string& condition) const {
    return aggregate(condition).mean;
}

void SimilarityReport::append(const SimilarityReport& other) {
    records.insert(records.end(), other.records.begin(), other.records.end());
}

void SimilarityReport::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write report csv: " + path);
    out << "identity,condition,model,cosine\n";
    char line[256];
    for (const SimilarityRecord& r : records) {
        std::snprintf(line, sizeof(line), "%s,%s,%s,%.12g\n", r.identity.c_str(),
                      r.condition.c_str(), r.model.c_str(), r.cosine);
        out << line;
    }
}

SimilarityReport SimilarityReport::read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open report csv: " + path);
    SimilarityReport report;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        SimilarityRecord r;
        std::string cosine;
        if (!std::getline(ss, r.identity, ',') || !std::getline(ss, r.condition, ',') ||
            !std::getline(ss, r.model, ',') || !std::getline(ss, cosine)) {
            throw IoError("malformed report row: " + line);
        }
        r.cosine = std::stod(cosine);
        report.records.push_back(std::move(r));
    }
    return report;
}

SimilarityReport eval_similarity(const MaskCondition& condition,
                                 const std::vector<FaceSample>& dataset,
                                 const EmbeddingModel& model, const IdentityGallery& gallery,
                                 const RenderContext& ctx, Rng& rng) {
    if (dataset.empty()) throw InvalidConfig("eval_similarity: empty dataset");
    SimilarityReport report;
    report.records.reserve(dataset.size());
    for (const FaceSample& face : dataset) {
        const std::vector<double>& gt = gallery.entry(face.identity);
        double cosine;
        if (condition.texture) {
            const AugmentationParams params = sample_augmentation(rng, ctx.augmentation);
            const Image rendered = render_with(ctx, *condition.texture, face, params);
            cosine = cosine_similarity(model.embed(rendered), gt);
        } else {
            cosine = cosine_similarity(model.embed(face.image), gt);
        }
        report.records.push_back({face.identity, condition.name, model.name(), cosine});
    }
    return report;
}

TransferabilityMatrix transferability_matrix(const std::vector<MaskCondition>& masks,
                                             const ModelList& models,
                                             const GalleryList& galleries,
                                             const std::vector<FaceSample>& dataset,
                                             const RenderContext& ctx, const Rng& base_rng) {
    if (models.size() != galleries.size()) {
        throw InvalidConfig("transferability_matrix: one gallery per model required");
    }
    TransferabilityMatrix matrix;
    for (const MaskCondition& mask : masks) matrix.mask_names.push_back(mask.name);
    for (const auto& model : models) matrix.model_names.push_back(model->name());
    matrix.mean_cosine.assign(masks.size(), std::vector<double>(models.size(), 0.0));
    for (size_t mi = 0; mi < masks.size(); ++mi) {
        for (size_t ji = 0; ji < models.size(); ++ji) {
            // Independent substream per cell: cell values do not depend on
            // evaluation order.
            Rng rng = base_rng.substream("transfer/" + masks[mi].name + "/" +
                                         models[ji]->name());
            const SimilarityReport report =
                eval_similarity(masks[mi], dataset, *models[ji], *galleries[ji], ctx, rng);
            matrix.mean_cosine[mi][ji] = report.mean(masks[mi].name);
        }
    }
    return matrix;
}

void TransferabilityMatrix::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write matrix csv: " + path);
    out << "mask";
    for (const std::string& m : model_names) out << "," << m;
    out << "\n";
    char cell[64];
    for (size_t i = 0; i < mask_names.size(); ++i) {
        out << mask_names[i];
        for (size_t j = 0; j < model_names.size(); ++j) {
            std::snprintf(cell, sizeof(cell), ",%.12g", mean_cosine[i][j]);
            out << cell;
        }
        out << "\n";
    }
}

TransferabilityMatrix TransferabilityMatrix::read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open matrix csv: " + path);
    TransferabilityMatrix matrix;
    std::string line;
    if (!std::getline(in, line)) throw IoError("matrix csv is empty: " + path);
    {
        std::istringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');  // "mask" corner
        while (std::getline(ss, cell, ',')) matrix.model_names.push_back(cell);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        matrix.mask_names.push_back(cell);
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != matrix.model_names.size()) {
            throw IoError("matrix row width mismatch in " + path);
        }
        matrix.mean_cosine.push_back(std::move(row));
    }
    return matrix;
}

double calibrate_threshold_from_scores(std::vector<double> sims, double far_target) {
    if (sims.empty()) throw EmptyProbeSet("threshold calibration needs impostor similarities");
    if (!(far_target > 0.0 && far_target < 1.0)) {
        throw InvalidConfig("far_target must lie in (0,1)");
    }
    std::sort(sims.begin(), sims.end());
    const double n = static_cast<double>(sims.size());
    // Candidates are the distinct observed values in ascending order;
    // count(>= t) for t == sims[i] is n - i after skipping duplicates.
    for (size_t i = 0; i < sims.size(); ++i) {
        if (i > 0 && sims[i] == sims[i - 1]) continue;
        const double far = static_cast<double>(sims.size() - i) / n;
        if (far <= far_target) return sims[i];
    }
    // Even the maximum admits too many: step just above it.
    return std::nextafter(sims.back(), std::numeric_limits<double>::infinity());
}

std::vector<double> impostor_scores(const EmbeddingModel& model, const IdentityGallery& gallery,
                                    const std::vector<FaceSample>& probes,
                                    const std::optional<MaskTexture>& impostor_mask,
                                    const RenderContext& ctx, Rng& rng) {
    if (probes.empty()) throw EmptyProbeSet("impostor probe set is empty");
    std::vector<double> sims;
    const std::vector<std::string> identities = gallery.identities();
    for (const FaceSample& probe : probes) {
        std::vector<double> embedding;
        if (impostor_mask) {
            const AugmentationParams params = sample_augmentation(rng, ctx.augmentation);
            embedding = model.embed(render_with(ctx, *impostor_mask, probe, params));
        } else {
            embedding = model.embed(probe.image);
        }
        for (const std::string& identity : identities) {
            if (identity == probe.identity) continue;
            sims.push_back(cosine_similarity(embedding, gallery.entry(identity)));
        }
    }
    if (sims.empty()) {
        throw EmptyProbeSet("no impostor pairings (all probes match the only gallery identity)");
    }
    return sims;
}

double calibrate_threshold(const EmbeddingModel& model, const IdentityGallery& gallery,
                           const std::vector<FaceSample>& impostor_probe_set, double far_target,
                           const std::optional<MaskTexture>& impostor_mask,
                           const RenderContext& ctx, Rng& rng) {
    return calibrate_threshold_from_scores(
        impostor_scores(model, gallery, impostor_probe_set, impostor_mask, ctx, rng), far_target);
}

}  // namespace advmask
