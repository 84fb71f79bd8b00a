#include "advmask/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "advmask/errors.hpp"

namespace advmask {

void OptimizerConfig::validate() const {
    if (lambda_tv < 0.0) throw InvalidConfig("lambda_tv must be >= 0");
    if (!(learning_rate > 0.0)) throw InvalidConfig("learning_rate must be > 0");
    if (batch_size <= 0) throw InvalidConfig("batch_size must be positive");
    if (max_iterations < 0) throw InvalidConfig("max_iterations must be >= 0");
    if (ensemble.empty()) throw InvalidConfig("ensemble must name at least one model");
    if (plateau_patience <= 0) throw InvalidConfig("plateau_patience must be positive");
    if (workers <= 0) throw InvalidConfig("workers must be positive");
}

void TrainingHistory::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write history csv: " + path);
    out << "iteration,sim_loss,tv_loss,total_loss,seconds\n";
    char line[160];
    for (const HistoryRecord& r : records) {
        std::snprintf(line, sizeof(line), "%d,%.12g,%.12g,%.12g,%.3f\n", r.iteration, r.sim_loss,
                      r.tv_loss, r.total_loss, r.seconds);
        out << line;
    }
}

namespace {

std::vector<FaceSample> pick_batch(const std::vector<FaceSample>& dataset, int batch_size,
                                   Rng& rng) {
    const int n = static_cast<int>(dataset.size());
    const int k = std::min(batch_size, n);
    // Partial Fisher-Yates over an index vector: a batch without replacement.
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::vector<FaceSample> batch;
    batch.reserve(k);
    for (int i = 0; i < k; ++i) {
        const int j = static_cast<int>(rng.uniform_int(i, n - 1));
        std::swap(idx[i], idx[j]);
        batch.push_back(dataset[idx[i]]);
    }
    return batch;
}

std::pair<MaskTexture, TrainingHistory> run_optimization(
    const MaskTexture& initial_mask, const std::vector<FaceSample>& dataset,
    const ModelList& models, const GalleryList& galleries, const OptimizerConfig& config,
    const RenderContext& ctx) {
    config.validate();
    if (dataset.empty()) throw InvalidConfig("optimization dataset is empty");
    initial_mask.validate();
    for (const FaceSample& face : dataset) {
        for (const IdentityGallery* gallery : galleries) {
            if (!gallery->contains(face.identity)) {
                throw MissingIdentity("dataset identity not enrolled: " + face.identity);
            }
        }
    }

    MaskTexture mask = initial_mask;
    mask.clamp_pixels();

    TrainingHistory history;
    history.config = config;
    history.records.reserve(config.max_iterations);

    const size_t n_pixels = mask.pixels.data.size();
    std::vector<double> m1(n_pixels, 0.0), m2(n_pixels, 0.0);

    Rng root(config.seed);
    double best_sim = 1e300;
    int since_improvement = 0;
    const auto t0 = std::chrono::steady_clock::now();

    for (int iter = 0; iter < config.max_iterations; ++iter) {
        Rng batch_rng = root.substream("batch", static_cast<std::uint64_t>(iter));
        const std::vector<FaceSample> batch = pick_batch(dataset, config.batch_size, batch_rng);
        Rng render_rng = root.substream("render", static_cast<std::uint64_t>(iter));

        TotalLossGradient step = total_loss_grad(mask, batch, models, galleries, config.lambda_tv,
                                                 ctx, render_rng, config.workers);
        if (!std::isfinite(step.value.total)) {
            throw NonFiniteLoss("non-finite loss at iteration " + std::to_string(iter) +
                                " (sim=" + std::to_string(step.value.sim) +
                                ", tv=" + std::to_string(step.value.tv) + ")");
        }

        // Adam with bias correction, then projection back into [0,1].
        const double bc1 = 1.0 - std::pow(config.adam_beta1, iter + 1);
        const double bc2 = 1.0 - std::pow(config.adam_beta2, iter + 1);
        for (size_t k = 0; k < n_pixels; ++k) {
            const double g = step.grad.data[k];
            m1[k] = config.adam_beta1 * m1[k] + (1.0 - config.adam_beta1) * g;
            m2[k] = config.adam_beta2 * m2[k] + (1.0 - config.adam_beta2) * g * g;
            const double update = (m1[k] / bc1) / (std::sqrt(m2[k] / bc2) + config.adam_epsilon);
            mask.pixels.data[k] = clamp01(mask.pixels.data[k] - config.learning_rate * update);
        }

        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        history.records.push_back(
            {iter, step.value.sim, step.value.tv, step.value.total, seconds});

        if (config.plateau_enabled) {
            if (step.value.sim < best_sim - config.plateau_min_delta) {
                best_sim = step.value.sim;
                since_improvement = 0;
            } else if (++since_improvement >= config.plateau_patience) {
                break;
            }
        }
    }
    return {std::move(mask), std::move(history)};
}

}  // namespace

std::pair<MaskTexture, TrainingHistory> optimize_universal(
    const MaskTexture& initial_mask, const std::vector<FaceSample>& dataset,
    const ModelList& models, const GalleryList& galleries, const OptimizerConfig& config,
    const RenderContext& ctx) {
    return run_optimization(initial_mask, dataset, models, galleries, config, ctx);
}

std::pair<MaskTexture, TrainingHistory> optimize_targeted(
    const MaskTexture& initial_mask, const std::vector<FaceSample>& single_identity_images,
    const ModelList& models, const GalleryList& galleries, const OptimizerConfig& config,
    const RenderContext& ctx) {
    if (single_identity_images.empty()) throw InvalidConfig("targeted optimization needs images");
    const std::string& identity = single_identity_images.front().identity;
    for (const FaceSample& face : single_identity_images) {
        if (face.identity != identity) {
            throw MixedIdentities("targeted optimization requires a single identity, got '" +
                                  identity + "' and '" + face.identity + "'");
        }
    }
    return run_optimization(initial_mask, single_identity_images, models, galleries, config, ctx);
}

}  // namespace advmask
