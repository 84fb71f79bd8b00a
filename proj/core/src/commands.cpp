#include "advmask/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "advmask/defense.hpp"
#include "advmask/errors.hpp"
#include "advmask/eval.hpp"
#include "advmask/plot.hpp"
#include "advmask/png_io.hpp"

namespace advmask {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path prepare_out_dir(const ExperimentConfig& config) {
    const fs::path out(config.out_dir());
    fs::create_directories(out);
    config.write_snapshot((out / "config.snapshot.json").string());
    return out;
}

std::vector<MaskTexture> standard_gallery_masks() {
    const Image support = default_mask_support();
    return {standard_mask(StandardMaskColor::blue, support),
            standard_mask(StandardMaskColor::black, support),
            standard_mask(StandardMaskColor::white, support)};
}

/// Splits samples into (gallery images, probe images) per identity.
/// gallery_split == 0 enrolls and probes the full set.
std::pair<ImagesByIdentity, std::vector<FaceSample>> split_for_eval(
    const std::vector<FaceSample>& samples, int gallery_split) {
    ImagesByIdentity grouped = group_by_identity(samples);
    if (gallery_split <= 0) return {grouped, samples};
    ImagesByIdentity gallery_images;
    std::vector<FaceSample> probes;
    for (auto& [identity, faces] : grouped) {
        const int k = std::min<int>(gallery_split, static_cast<int>(faces.size()));
        for (int i = 0; i < static_cast<int>(faces.size()); ++i) {
            if (i < k) {
                gallery_images[identity].push_back(faces[i]);
            } else {
                probes.push_back(faces[i]);
            }
        }
        if (gallery_images[identity].empty()) {
            gallery_images[identity].push_back(faces.front());
        }
    }
    if (probes.empty()) probes = samples;
    return {gallery_images, probes};
}

IdentityGallery build_gallery_for(const EmbeddingModel& model, const ImagesByIdentity& images,
                                  GalleryMode mode, const RenderContext& ctx, const Rng& root) {
    Rng rng = root.substream("gallery/" + model.name());
    return build_gallery(model, images, mode, standard_gallery_masks(), ctx, rng);
}

MaskCondition resolve_condition(const std::string& name, const ExperimentConfig& config,
                                const json& section, const Rng& root) {
    const Image support = default_mask_support();
    if (name == "clean") return MaskCondition::clean();
    if (name == "blue") {
        return MaskCondition::textured("blue", standard_mask(StandardMaskColor::blue, support));
    }
    if (name == "black") {
        return MaskCondition::textured("black", standard_mask(StandardMaskColor::black, support));
    }
    if (name == "white") {
        return MaskCondition::textured("white", standard_mask(StandardMaskColor::white, support));
    }
    if (name == "random") {
        Rng rng = root.substream("random_mask");
        return MaskCondition::textured("random", random_mask(rng, support));
    }
    if (name == "male_face") {
        return MaskCondition::textured("male_face", face_control_mask(/*male=*/true, support));
    }
    if (name == "female_face") {
        return MaskCondition::textured("female_face", face_control_mask(/*male=*/false, support));
    }
    if (name == "adv") {
        if (!section.contains("checkpoint")) {
            throw InvalidConfig("condition 'adv' needs a 'checkpoint' path in the section");
        }
        return MaskCondition::textured(
            "adv", load_checkpoint(section.at("checkpoint").get<std::string>()));
    }
    (void)config;
    throw InvalidConfig("unknown mask condition: " + name);
}

json aggregate_to_json(const SimilarityAggregate& agg) {
    return json{{"count", agg.count}, {"mean", agg.mean}, {"median", agg.median},
                {"q1", agg.q1},       {"q3", agg.q3},     {"min", agg.min},
                {"max", agg.max}};
}

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << doc.dump(2) << "\n";
}

}  // namespace

MaskTexture load_checkpoint(const std::string& checkpoint_dir) {
    const fs::path dir(checkpoint_dir);
    const fs::path texture = dir / "mask.png";
    const fs::path support = dir / "mask.support.png";
    if (!fs::exists(texture)) throw AssetMissing("checkpoint texture not found: " + texture.string());
    if (!fs::exists(support)) throw AssetMissing("checkpoint support not found: " + support.string());
    return load_mask_texture(texture.string(), support.string());
}

int cmd_train(const ExperimentConfig& config, std::ostream& log) {
    const fs::path out = prepare_out_dir(config);
    const json& section = config.section("train");

    RenderContext ctx = config.render_context();
    auto landmarks = config.landmark_backend();
    std::vector<FaceSample> dataset = load_dataset(config.dataset_spec(), *landmarks);

    OptimizerConfig opt = config.optimizer_config();
    if (opt.ensemble.empty()) throw InvalidConfig("train.ensemble must name at least one model");

    ModelRegistry registry = config.model_registry();
    ModelList models;
    for (const std::string& name : opt.ensemble) models.push_back(registry.load(name));

    Rng root(config.seed());
    if (opt.mode == OptimizeMode::targeted) {
        const std::string target = section.value("target_identity", std::string());
        if (target.empty()) throw InvalidConfig("targeted training needs train.target_identity");
        std::vector<FaceSample> filtered;
        for (const FaceSample& f : dataset) {
            if (f.identity == target) filtered.push_back(f);
        }
        if (filtered.empty()) throw MissingIdentity("target identity not in dataset: " + target);
        dataset = std::move(filtered);
    }

    // Ground-truth embeddings for training use the plain generation approach.
    const ImagesByIdentity grouped = group_by_identity(dataset);
    std::vector<IdentityGallery> galleries;
    galleries.reserve(models.size());
    for (const auto& model : models) {
        galleries.push_back(build_gallery_for(*model, grouped, GalleryMode::plain, ctx, root));
    }
    GalleryList gallery_ptrs;
    for (const IdentityGallery& g : galleries) gallery_ptrs.push_back(&g);

    Image support = default_mask_support();
    if (const std::string path = section.value("support_png", std::string()); !path.empty()) {
        Image raw = read_png(path);
        if (raw.channels != 1) throw IoError("support template must be grayscale: " + path);
        for (double& v : raw.data) v = v >= 0.5 ? 1.0 : 0.0;
        support = std::move(raw);
    }
    const MaskTexture initial = white_mask(support);

    log << "training " << (opt.mode == OptimizeMode::universal ? "universal" : "targeted")
        << " mask: " << dataset.size() << " images, ensemble of " << models.size()
        << ", max_iterations=" << opt.max_iterations << "\n";

    auto [mask, history] =
        opt.mode == OptimizeMode::targeted
            ? optimize_targeted(initial, dataset, models, gallery_ptrs, opt, ctx)
            : optimize_universal(initial, dataset, models, gallery_ptrs, opt, ctx);

    save_mask_texture(mask, (out / "mask.png").string(), (out / "mask.support.png").string());
    history.write_csv((out / "history.csv").string());

    json meta;
    meta["version"] = 1;
    meta["mode"] = opt.mode == OptimizeMode::universal ? "universal" : "targeted";
    meta["seed"] = opt.seed;
    meta["iterations_run"] = history.records.size();
    meta["max_iterations"] = opt.max_iterations;
    meta["lambda_tv"] = opt.lambda_tv;
    meta["learning_rate"] = opt.learning_rate;
    meta["batch_size"] = opt.batch_size;
    meta["ensemble"] = opt.ensemble;
    meta["dataset_fingerprint"] = dataset_fingerprint(dataset);
    meta["config_checksum"] = hash_hex(fnv1a64(config.snapshot_text()));
    if (!history.records.empty()) {
        const HistoryRecord& last = history.records.back();
        meta["final"] = {{"sim_loss", last.sim_loss},
                         {"tv_loss", last.tv_loss},
                         {"total_loss", last.total_loss}};
    }
    if (opt.mode == OptimizeMode::targeted) {
        meta["target_identity"] = section.value("target_identity", std::string());
    }
    write_json(out / "mask.meta.json", meta);

    if (!history.records.empty()) {
        log << "final sim_loss=" << history.records.back().sim_loss
            << " tv_loss=" << history.records.back().tv_loss << "\n";
    }
    log << "checkpoint written to " << out.string() << "\n";
    return 0;
}

int cmd_eval(const ExperimentConfig& config, std::ostream& log) {
    const fs::path out = prepare_out_dir(config);
    const json& section = config.section("eval");

    RenderContext ctx = config.render_context();
    auto landmarks = config.landmark_backend();
    const std::vector<FaceSample> dataset = load_dataset(config.dataset_spec(), *landmarks);
    const auto [gallery_images, probes] =
        split_for_eval(dataset, section.value("gallery_split", 0));

    ModelRegistry registry = config.model_registry();
    const std::string model_name = section.value("model", std::string());
    if (model_name.empty()) throw InvalidConfig("eval.model is required");
    auto model = registry.load(model_name);

    const GalleryMode mode =
        gallery_mode_from_name(section.value("gallery_mode", std::string("mask_augmented")));
    Rng root(config.seed());
    const IdentityGallery gallery = build_gallery_for(*model, gallery_images, mode, ctx, root);

    std::vector<std::string> condition_names =
        section.value("conditions", std::vector<std::string>{"clean", "blue", "random"});

    SimilarityReport report;
    json summary;
    summary["model"] = model_name;
    summary["gallery_mode"] = gallery_mode_name(mode);
    summary["probes"] = probes.size();
    for (const std::string& name : condition_names) {
        const MaskCondition condition = resolve_condition(name, config, section, root);
        Rng rng = root.substream("eval/" + name);
        const SimilarityReport part =
            eval_similarity(condition, probes, *model, gallery, ctx, rng);
        summary["conditions"][name] = aggregate_to_json(part.aggregate(name));
        report.append(part);
        log << "condition " << name << ": mean cosine " << part.mean(name) << "\n";
    }

    report.write_csv((out / "report.csv").string());
    write_json(out / "summary.json", summary);
    write_boxplot_png(report, (out / "boxplot.png").string());
    return 0;
}

int cmd_transfer(const ExperimentConfig& config, std::ostream& log) {
    const fs::path out = prepare_out_dir(config);
    const json& section = config.section("transfer");

    RenderContext ctx = config.render_context();
    auto landmarks = config.landmark_backend();
    const std::vector<FaceSample> dataset = load_dataset(config.dataset_spec(), *landmarks);
    const auto [gallery_images, probes] =
        split_for_eval(dataset, section.value("gallery_split", 0));

    ModelRegistry registry = config.model_registry();
    const std::vector<std::string> model_names =
        section.at("models").get<std::vector<std::string>>();
    if (model_names.empty()) throw InvalidConfig("transfer.models must not be empty");

    ModelList models;
    for (const std::string& name : model_names) models.push_back(registry.load(name));

    const GalleryMode mode =
        gallery_mode_from_name(section.value("gallery_mode", std::string("mask_augmented")));
    Rng root(config.seed());
    std::vector<IdentityGallery> galleries;
    galleries.reserve(models.size());
    for (const auto& model : models) {
        galleries.push_back(build_gallery_for(*model, gallery_images, mode, ctx, root));
    }
    GalleryList gallery_ptrs;
    for (const IdentityGallery& g : galleries) gallery_ptrs.push_back(&g);

    std::vector<MaskCondition> conditions;
    for (const json& m : section.at("masks")) {
        if (m.is_string()) {
            conditions.push_back(resolve_condition(m.get<std::string>(), config, section, root));
        } else {
            const std::string name = m.at("name").get<std::string>();
            conditions.push_back(
                MaskCondition::textured(name, load_checkpoint(m.at("checkpoint").get<std::string>())));
        }
    }

    const TransferabilityMatrix matrix =
        transferability_matrix(conditions, models, gallery_ptrs, probes, ctx, root);
    matrix.write_csv((out / "matrix.csv").string());
    write_heatmap_png(matrix, (out / "heatmap.png").string());

    json summary;
    summary["models"] = matrix.model_names;
    summary["masks"] = matrix.mask_names;
    summary["mean_cosine"] = matrix.mean_cosine;
    write_json(out / "summary.json", summary);

    for (size_t i = 0; i < matrix.mask_names.size(); ++i) {
        log << matrix.mask_names[i] << ":";
        for (size_t j = 0; j < matrix.model_names.size(); ++j) {
            log << " " << matrix.mean_cosine[i][j];
        }
        log << "\n";
    }
    return 0;
}

int cmd_calibrate(const ExperimentConfig& config, std::ostream& log) {
    const fs::path out = prepare_out_dir(config);
    const json& section = config.section("calibrate");

    RenderContext ctx = config.render_context();
    auto landmarks = config.landmark_backend();
    const std::vector<FaceSample> dataset = load_dataset(config.dataset_spec(), *landmarks);
    const auto [gallery_images, probes] =
        split_for_eval(dataset, section.value("gallery_split", 0));

    ModelRegistry registry = config.model_registry();
    auto model = registry.load(section.at("model").get<std::string>());
    const GalleryMode mode =
        gallery_mode_from_name(section.value("gallery_mode", std::string("mask_augmented")));
    const double far_target = section.value("far_target", 0.01);

    Rng root(config.seed());
    const IdentityGallery gallery = build_gallery_for(*model, gallery_images, mode, ctx, root);

    std::optional<MaskTexture> impostor_mask;
    const std::string mask_name = section.value("impostor_mask", std::string("blue"));
    if (mask_name != "none") {
        MaskCondition condition = resolve_condition(mask_name, config, section, root);
        if (condition.texture) impostor_mask = std::move(condition.texture);
    }

    Rng rng = root.substream("calibrate");
    const std::vector<double> scores =
        impostor_scores(*model, gallery, probes, impostor_mask, ctx, rng);
    const double threshold = calibrate_threshold_from_scores(scores, far_target);

    json doc;
    doc["threshold"] = threshold;
    doc["far_target"] = far_target;
    doc["impostor_comparisons"] = scores.size();
    doc["impostor_mask"] = mask_name;
    doc["model"] = model->name();
    write_json(out / "threshold.json", doc);
    log << "threshold " << threshold << " at FAR " << far_target << " over " << scores.size()
        << " impostor comparisons\n";
    return 0;
}

namespace {

std::vector<Image> resolve_frames(const json& section) {
    std::vector<Image> frames;
    if (section.contains("frames_dir")) {
        const std::string dir = section.at("frames_dir").get<std::string>();
        std::vector<std::string> files;
        if (!fs::is_directory(dir)) throw IoError("frames_dir is not a directory: " + dir);
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".png") {
                files.push_back(entry.path().string());
            }
        }
        std::sort(files.begin(), files.end());
        for (const std::string& file : files) frames.push_back(read_png(file));
    } else if (section.contains("frames")) {
        for (const json& token : section.at("frames")) {
            const std::string spec = token.get<std::string>();
            if (spec == "blank") {
                frames.emplace_back(kFaceSize, kFaceSize, 3, 0.5);
            } else {
                const auto colon = spec.rfind(':');
                if (colon == std::string::npos) {
                    throw InvalidConfig("frame spec must be 'blank' or 'identity:variant': " + spec);
                }
                const std::string identity = spec.substr(0, colon);
                const int variant = std::stoi(spec.substr(colon + 1));
                frames.push_back(synth_face(identity, variant).image);
            }
        }
    } else {
        throw InvalidConfig("simulate needs 'frames_dir' or 'frames'");
    }
    if (frames.empty()) throw InvalidConfig("simulate: no frames resolved");
    return frames;
}

double resolve_threshold(const json& section) {
    const json& t = section.at("threshold");
    if (t.is_number()) return t.get<double>();
    const std::string path = t.get<std::string>();
    std::ifstream in(path);
    if (!in) throw IoError("cannot open threshold file: " + path);
    json doc;
    in >> doc;
    return doc.at("threshold").get<double>();
}

}  // namespace

int cmd_simulate(const ExperimentConfig& config, std::ostream& log) {
    const fs::path out = prepare_out_dir(config);
    const json& section = config.section("simulate");

    RenderContext ctx = config.render_context();
    auto landmarks = config.landmark_backend();
    const std::vector<FaceSample> dataset = load_dataset(config.dataset_spec(), *landmarks);
    const auto [gallery_images, probes] =
        split_for_eval(dataset, section.value("gallery_split", 0));

    ModelRegistry registry = config.model_registry();
    auto model = registry.load(section.at("model").get<std::string>());
    const GalleryMode mode =
        gallery_mode_from_name(section.value("gallery_mode", std::string("mask_augmented")));
    Rng root(config.seed());
    const IdentityGallery gallery = build_gallery_for(*model, gallery_images, mode, ctx, root);

    const std::string subject = section.at("subject").get<std::string>();
    const double threshold = resolve_threshold(section);
    const std::vector<Image> frames = resolve_frames(section);

    const std::string rule_name = section.value("rule", std::string("argmax_correct"));
    RecognitionRule rule;
    if (rule_name == "argmax_correct") {
        rule = RecognitionRule::argmax_correct;
    } else if (rule_name == "true_identity_threshold") {
        rule = RecognitionRule::true_identity_threshold;
    } else {
        throw InvalidConfig("simulate.rule must be argmax_correct or true_identity_threshold");
    }

    const std::string detector_name = section.value("detector", std::string("passthrough"));
    std::unique_ptr<FrameDetector> detector;
    if (detector_name == "passthrough") {
        detector = std::make_unique<PassThroughDetector>();
    } else if (detector_name == "annotation") {
        detector = std::make_unique<AnnotationDetector>(
            make_landmark_backend("annotation", config.asset_dir()));
    } else {
        throw InvalidConfig("unknown detector backend: " + detector_name);
    }

    const std::vector<VerificationEvent> events =
        simulate_stream(frames, *detector, *model, gallery, threshold, subject, rule);
    write_events_csv(events, (out / "events.csv").string());

    const PersistenceConfig persistence = config.persistence_config();
    int detected = 0, recognized = 0;
    for (const VerificationEvent& e : events) {
        detected += e.detected ? 1 : 0;
        recognized += e.recognized ? 1 : 0;
    }
    json summary;
    summary["frames"] = events.size();
    summary["detected"] = detected;
    summary["recognized"] = recognized;
    summary["threshold"] = threshold;
    summary["subject"] = subject;
    summary["persistence"] = {{"window", persistence.window},
                              {"hits_required", persistence.hits_required}};
    if (detected > 0) {
        summary["recognition_rate"] = recognition_rate(events);
    } else {
        summary["recognition_rate"] = nullptr;
    }
    summary["identified"] = persistence_detection(events, persistence);
    write_json(out / "summary.json", summary);

    log << "frames=" << events.size() << " detected=" << detected << " recognized=" << recognized
        << " identified=" << (summary["identified"].get<bool>() ? "yes" : "no") << "\n";
    return 0;
}

int cmd_defend(const ExperimentConfig& config, std::ostream& log) {
    const fs::path out = prepare_out_dir(config);
    const json& section = config.section("defend");
    const std::string mode = section.value("mode", std::string("substitute"));

    RenderContext ctx = config.render_context();
    auto landmarks = config.landmark_backend();
    Rng root(config.seed());

    if (mode == "substitute") {
        SanitizationPolicy policy = SanitizationPolicy::standard_blue();
        const std::string replacement = section.value("replacement", std::string("blue"));
        if (replacement != "blue") {
            MaskCondition condition = resolve_condition(replacement, config, section, root);
            if (!condition.texture) throw InvalidConfig("replacement cannot be 'clean'");
            policy.replacement = std::move(*condition.texture);
        }

        std::vector<std::pair<std::string, Image>> inputs;  // (name, image)
        if (section.contains("input_dir")) {
            const std::string dir = section.at("input_dir").get<std::string>();
            if (fs::is_directory(dir)) {
                std::vector<std::string> files;
                for (const auto& entry : fs::directory_iterator(dir)) {
                    if (entry.is_regular_file() && entry.path().extension() == ".png") {
                        files.push_back(entry.path().string());
                    }
                }
                std::sort(files.begin(), files.end());
                for (const std::string& file : files) {
                    inputs.emplace_back(fs::path(file).stem().string(), read_png(file));
                }
            }
        } else {
            const std::vector<FaceSample> dataset =
                load_dataset(config.dataset_spec(), *landmarks);
            for (size_t i = 0; i < dataset.size(); ++i) {
                inputs.emplace_back(dataset[i].identity + "_" + std::to_string(i),
                                    dataset[i].image);
            }
        }

        const fs::path sanitized_dir = out / "sanitized";
        fs::create_directories(sanitized_dir);
        std::ofstream manifest(out / "manifest.csv");
        manifest << "input,output\n";
        int count = 0;
        for (const auto& [name, image] : inputs) {
            const std::vector<Point2> points = detect_landmarks(image, *landmarks);
            const Image clean = substitute_mask(image, points, policy, ctx);
            const std::string out_path = (sanitized_dir / (name + ".png")).string();
            write_png_rgb(out_path, clean);
            manifest << name << "," << out_path << "\n";
            ++count;
        }
        if (count == 0) {
            log << "warning: no input images found, manifest is empty\n";
        }
        json summary;
        summary["mode"] = "substitute";
        summary["sanitized"] = count;
        write_json(out / "summary.json", summary);
        log << "sanitized " << count << " images\n";
        return 0;
    }

    if (mode == "generate") {
        const std::vector<FaceSample> dataset = load_dataset(config.dataset_spec(), *landmarks);
        std::vector<std::pair<std::string, MaskTexture>> masks;
        for (const json& m : section.at("masks")) {
            if (m.is_string()) {
                MaskCondition condition =
                    resolve_condition(m.get<std::string>(), config, section, root);
                if (!condition.texture) throw InvalidConfig("defend masks cannot include 'clean'");
                masks.emplace_back(condition.name, std::move(*condition.texture));
            } else {
                masks.emplace_back(m.at("name").get<std::string>(),
                                   load_checkpoint(m.at("checkpoint").get<std::string>()));
            }
        }
        Rng rng = root.substream("advset");
        const AdvTrainingManifest manifest =
            generate_adv_training_set(dataset, masks, rng, ctx, (out / "advset").string());
        manifest.write_csv((out / "manifest.csv").string());
        json summary;
        summary["mode"] = "generate";
        summary["entries"] = manifest.items.size();
        summary["failures"] = manifest.failures;
        write_json(out / "summary.json", summary);
        log << "manifest entries: " << manifest.items.size() << " (failures "
            << manifest.failures.size() << ")\n";
        return 0;
    }

    throw InvalidConfig("defend.mode must be 'substitute' or 'generate'");
}

int cmd_report(const ExperimentConfig& config, std::ostream& log) {
    const fs::path out = prepare_out_dir(config);
    const json& section = config.section("report");
    bool wrote = false;
    if (section.contains("boxplot_from")) {
        const SimilarityReport report =
            SimilarityReport::read_csv(section.at("boxplot_from").get<std::string>());
        write_boxplot_png(report, (out / "boxplot.png").string());
        log << "boxplot.png written\n";
        wrote = true;
    }
    if (section.contains("heatmap_from")) {
        const TransferabilityMatrix matrix =
            TransferabilityMatrix::read_csv(section.at("heatmap_from").get<std::string>());
        write_heatmap_png(matrix, (out / "heatmap.png").string());
        log << "heatmap.png written\n";
        wrote = true;
    }
    if (!wrote) throw InvalidConfig("report needs 'boxplot_from' and/or 'heatmap_from'");
    return 0;
}

int cmd_fetch(const ExperimentConfig& config, std::ostream& log) {
    const fs::path out = prepare_out_dir(config);
    const json& section = config.section("fetch");
    const std::string manifest_path = section.at("manifest").get<std::string>();
    std::ifstream in(manifest_path);
    if (!in) throw AssetMissing("asset manifest not found: " + manifest_path);
    json manifest;
    in >> manifest;

    const fs::path asset_dir =
        config.asset_dir().empty() ? fs::path(".") : fs::path(config.asset_dir());
    json result;
    result["verified"] = json::array();
    result["missing"] = json::array();
    bool all_ok = true;
    for (const json& asset : manifest.at("assets")) {
        const std::string rel = asset.at("path").get<std::string>();
        const std::string checksum = asset.value("checksum", std::string());
        const fs::path path = asset_dir / rel;
        if (!fs::exists(path)) {
            json entry{{"path", rel}};
            if (asset.contains("url")) entry["url"] = asset.at("url");
            result["missing"].push_back(entry);
            log << "missing: " << rel << "\n";
            all_ok = false;
            continue;
        }
        const std::string actual = file_checksum_hex(path.string());
        if (!checksum.empty() && actual != checksum) {
            throw ChecksumMismatch("asset checksum mismatch for " + rel + ": expected " +
                                   checksum + ", got " + actual);
        }
        result["verified"].push_back({{"path", rel}, {"checksum", actual}});
        log << "verified: " << rel << "\n";
    }
    write_json(out / "fetch_report.json", result);
    if (!all_ok) {
        throw AssetMissing("one or more assets are missing; fetch them from the listed URLs");
    }
    return 0;
}

int run_command(const std::string& name, const ExperimentConfig& config, std::ostream& log,
                std::ostream& err) {
    try {
        if (name == "train") return cmd_train(config, log);
        if (name == "eval") return cmd_eval(config, log);
        if (name == "transfer") return cmd_transfer(config, log);
        if (name == "calibrate") return cmd_calibrate(config, log);
        if (name == "simulate") return cmd_simulate(config, log);
        if (name == "defend") return cmd_defend(config, log);
        if (name == "report") return cmd_report(config, log);
        if (name == "fetch") return cmd_fetch(config, log);
        throw InvalidConfig("unknown command: " + name);
    } catch (const Error& e) {
        err << json{{"error", e.code()}, {"message", e.what()}}.dump() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        err << json{{"error", "Internal"}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }
}

}  // namespace advmask
