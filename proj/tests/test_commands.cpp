#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "advmask/commands.hpp"
#include "advmask/eval.hpp"
#include "advmask/mask_texture.hpp"
#include "advmask/png_io.hpp"
#include "advmask/registry.hpp"

using namespace advmask;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& sub = "") const {
        return sub.empty() ? path.string() : (path / sub).string();
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

nlohmann::json base_config(const std::string& out_dir) {
    return nlohmann::json{
        {"version", 1},
        {"seed", 7},
        {"out_dir", out_dir},
        {"models",
         {{"inline",
           {{{"name", "toy_a"}, {"kind", "toy"}, {"dim", 64}, {"depth", 2}, {"seed", 101}}}}}},
        {"dataset", {{"kind", "synthetic"}, {"identities", 3}, {"images_per_identity", 2}}},
    };
}

int run(const nlohmann::json& doc, const std::string& command, std::string* err_out = nullptr) {
    const ExperimentConfig config = ExperimentConfig::from_json_text(doc.dump());
    std::ostringstream log, err;
    const int code = run_command(command, config, log, err);
    if (err_out) *err_out = err.str();
    return code;
}

}  // namespace

TEST_CASE("train with zero iterations writes the white-initialized checkpoint") {
    TempDir dir("advmask_cmd_train0");
    nlohmann::json doc = base_config(dir.str("out"));
    doc["train"] = {{"ensemble", {"toy_a"}}, {"max_iterations", 0}};
    REQUIRE(run(doc, "train") == 0);

    const MaskTexture checkpoint = load_checkpoint(dir.str("out"));
    const MaskTexture white = white_mask(default_mask_support());
    CHECK(max_abs_diff(checkpoint.pixels, white.pixels) == 0.0);
    CHECK(max_abs_diff(checkpoint.support, white.support) == 0.0);
    CHECK(fs::exists(dir.str("out/mask.meta.json")));
    CHECK(fs::exists(dir.str("out/history.csv")));
    CHECK(fs::exists(dir.str("out/config.snapshot.json")));
}

TEST_CASE("training twice from one config yields identical checkpoint bytes") {
    TempDir dir("advmask_cmd_repro");
    nlohmann::json doc = base_config(dir.str("a"));
    doc["train"] = {{"ensemble", {"toy_a"}}, {"max_iterations", 4}, {"batch_size", 4}};
    REQUIRE(run(doc, "train") == 0);
    doc["out_dir"] = dir.str("b");
    REQUIRE(run(doc, "train") == 0);
    CHECK(slurp(dir.str("a/mask.png")) == slurp(dir.str("b/mask.png")));
    CHECK(slurp(dir.str("a/mask.support.png")) == slurp(dir.str("b/mask.support.png")));
}

TEST_CASE("re-running from the written snapshot reproduces the outputs byte for byte") {
    TempDir dir("advmask_cmd_snapshot");
    nlohmann::json doc = base_config(dir.str("first"));
    doc["train"] = {{"ensemble", {"toy_a"}}, {"max_iterations", 3}, {"batch_size", 4}};
    REQUIRE(run(doc, "train") == 0);

    ExperimentConfig snapshot =
        ExperimentConfig::from_json_text(slurp(dir.str("first/config.snapshot.json")));
    snapshot.override_out_dir(dir.str("second"));
    std::ostringstream log, err;
    REQUIRE(run_command("train", snapshot, log, err) == 0);
    CHECK(slurp(dir.str("first/mask.png")) == slurp(dir.str("second/mask.png")));
    CHECK(slurp(dir.str("first/mask.support.png")) == slurp(dir.str("second/mask.support.png")));
}

TEST_CASE("history endpoints show improvement on a short toy run") {
    TempDir dir("advmask_cmd_hist");
    nlohmann::json doc = base_config(dir.str("out"));
    doc["dataset"]["identities"] = 4;
    doc["train"] = {{"ensemble", {"toy_a"}}, {"max_iterations", 20}, {"batch_size", 8}};
    REQUIRE(run(doc, "train") == 0);

    std::ifstream in(dir.str("out/history.csv"));
    std::string line;
    std::getline(in, line);  // header
    double first_sim = 0.0, last_sim = 0.0;
    bool first = true;
    while (std::getline(in, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const double sim = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        if (first) {
            first_sim = sim;
            first = false;
        }
        last_sim = sim;
    }
    CHECK(last_sim < first_sim);
}

TEST_CASE("eval with a missing checkpoint exits 2 and names the path") {
    TempDir dir("advmask_cmd_evalmissing");
    nlohmann::json doc = base_config(dir.str("out"));
    doc["eval"] = {{"model", "toy_a"},
                   {"conditions", {"adv"}},
                   {"checkpoint", dir.str("nothing_here")}};
    std::string err;
    CHECK(run(doc, "eval", &err) == 2);
    CHECK(err.find("nothing_here") != std::string::npos);
    CHECK(err.find("error") != std::string::npos);
}

TEST_CASE("eval writes report, summary and boxplot") {
    TempDir dir("advmask_cmd_eval");
    nlohmann::json doc = base_config(dir.str("out"));
    doc["eval"] = {{"model", "toy_a"}, {"conditions", {"clean", "blue"}}};
    REQUIRE(run(doc, "eval") == 0);
    CHECK(fs::exists(dir.str("out/report.csv")));
    CHECK(fs::exists(dir.str("out/summary.json")));
    CHECK(fs::exists(dir.str("out/boxplot.png")));
    const Image plot = read_png(dir.str("out/boxplot.png"));
    CHECK(plot.height > 100);
}

TEST_CASE("transfer writes the matrix, heatmap and summary") {
    TempDir dir("advmask_cmd_transfer");
    nlohmann::json doc = base_config(dir.str("out"));
    doc["models"]["inline"].push_back(
        {{"name", "toy_b"}, {"kind", "toy"}, {"dim", 32}, {"depth", 1}, {"seed", 202}});
    doc["transfer"] = {{"models", {"toy_a", "toy_b"}}, {"masks", {"clean", "blue"}}};
    REQUIRE(run(doc, "transfer") == 0);
    const TransferabilityMatrix matrix =
        TransferabilityMatrix::read_csv(dir.str("out/matrix.csv"));
    CHECK(matrix.mask_names == std::vector<std::string>{"clean", "blue"});
    CHECK(matrix.model_names == std::vector<std::string>{"toy_a", "toy_b"});
    CHECK(fs::exists(dir.str("out/heatmap.png")));
}

TEST_CASE("calibrate writes a threshold consistent with its inputs") {
    TempDir dir("advmask_cmd_cal");
    nlohmann::json doc = base_config(dir.str("out"));
    doc["dataset"]["identities"] = 5;
    doc["calibrate"] = {{"model", "toy_a"}, {"far_target", 0.1}, {"impostor_mask", "blue"}};
    REQUIRE(run(doc, "calibrate") == 0);
    nlohmann::json out;
    std::ifstream(dir.str("out/threshold.json")) >> out;
    CHECK(out["far_target"].get<double>() == 0.1);
    CHECK(out["threshold"].get<double>() <= 1.0);
    CHECK(out["threshold"].get<double>() >= -1.0);
    CHECK(out["impostor_comparisons"].get<int>() > 0);
}

TEST_CASE("simulate: enrolled crops at threshold zero give RR 1.0") {
    TempDir dir("advmask_cmd_sim");
    nlohmann::json doc = base_config(dir.str("out"));
    doc["simulate"] = {{"model", "toy_a"},
                       {"threshold", 0.0},
                       {"subject", "id000"},
                       {"frames", {"id000:0", "id000:1", "id000:0"}}};
    REQUIRE(run(doc, "simulate") == 0);
    nlohmann::json summary;
    std::ifstream(dir.str("out/summary.json")) >> summary;
    CHECK(summary["recognition_rate"].get<double>() == 1.0);
    CHECK(summary["detected"].get<int>() == 3);
    CHECK(fs::exists(dir.str("out/events.csv")));
}

TEST_CASE("simulate: the 7-of-10 persistence boundary shows up in the summary") {
    TempDir dir("advmask_cmd_sim7");
    nlohmann::json doc = base_config(dir.str("out"));
    auto frames = nlohmann::json::array();
    for (int i = 0; i < 7; ++i) frames.push_back("id000:" + std::to_string(i));
    for (int i = 0; i < 3; ++i) frames.push_back("id001:" + std::to_string(i));
    doc["simulate"] = {{"model", "toy_a"},
                       {"threshold", 0.0},
                       {"subject", "id000"},
                       {"frames", frames}};
    REQUIRE(run(doc, "simulate") == 0);
    nlohmann::json summary;
    std::ifstream(dir.str("out/summary.json")) >> summary;
    CHECK(summary["recognized"].get<int>() == 7);
    CHECK(summary["identified"].get<bool>());

    // One fewer recognized frame: no longer identified.
    frames[6] = "id001:9";
    doc["simulate"]["frames"] = frames;
    doc["out_dir"] = dir.str("out6");
    REQUIRE(run(doc, "simulate") == 0);
    std::ifstream(dir.str("out6/summary.json")) >> summary;
    CHECK(summary["recognized"].get<int>() == 6);
    CHECK_FALSE(summary["identified"].get<bool>());
}

TEST_CASE("defend substitute: empty input directory warns and writes an empty manifest") {
    TempDir dir("advmask_cmd_defend_empty");
    fs::create_directories(dir.str("empty_inputs"));
    nlohmann::json doc = base_config(dir.str("out"));
    doc["defend"] = {{"mode", "substitute"}, {"input_dir", dir.str("empty_inputs")}};
    const ExperimentConfig config = ExperimentConfig::from_json_text(doc.dump());
    std::ostringstream log, err;
    CHECK(run_command("defend", config, log, err) == 0);
    CHECK(log.str().find("warning") != std::string::npos);
    std::ifstream manifest(dir.str("out/manifest.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(manifest, line)) ++rows;
    CHECK(rows == 1);  // header only
}

TEST_CASE("defend generate: manifest counts inputs times one plus masks") {
    TempDir dir("advmask_cmd_defend_gen");
    nlohmann::json doc = base_config(dir.str("out"));
    doc["dataset"] = {{"kind", "synthetic"}, {"identities", 2}, {"images_per_identity", 2}};
    doc["defend"] = {{"mode", "generate"}, {"masks", {"blue", "white"}}};
    REQUIRE(run(doc, "defend") == 0);
    std::ifstream manifest(dir.str("out/manifest.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(manifest, line)) ++rows;
    // header + 4 inputs x (1 + 2 masks)
    CHECK(rows == 1 + 4 * 3);
}

TEST_CASE("report renders plots from existing CSVs") {
    TempDir dir("advmask_cmd_report");
    {
        std::ofstream report(dir.str("report.csv"));
        report << "identity,condition,model,cosine\n";
        report << "a,clean,m,0.9\nb,clean,m,0.7\na,adv,m,0.1\nb,adv,m,0.2\n";
        std::ofstream matrix(dir.str("matrix.csv"));
        matrix << "mask,m0,m1\nadv,0.1,0.3\nblue,0.5,0.6\n";
    }
    nlohmann::json doc = base_config(dir.str("out"));
    doc["report"] = {{"boxplot_from", dir.str("report.csv")},
                     {"heatmap_from", dir.str("matrix.csv")}};
    REQUIRE(run(doc, "report") == 0);
    CHECK(fs::exists(dir.str("out/boxplot.png")));
    CHECK(fs::exists(dir.str("out/heatmap.png")));
}

TEST_CASE("fetch verifies checksums and reports missing assets") {
    TempDir dir("advmask_cmd_fetch");
    const std::string asset = dir.str("weights.bin");
    {
        std::ofstream out(asset, std::ios::binary);
        out << "payload";
    }
    const std::string checksum = file_checksum_hex(asset);

    nlohmann::json manifest;
    manifest["assets"] = {{{"path", "weights.bin"}, {"checksum", checksum}}};
    std::ofstream(dir.str("assets.json")) << manifest.dump();

    nlohmann::json doc = base_config(dir.str("out"));
    doc["asset_dir"] = dir.str();
    doc["fetch"] = {{"manifest", dir.str("assets.json")}};
    CHECK(run(doc, "fetch") == 0);

    // Corrupt checksum -> ChecksumMismatch -> exit 2.
    manifest["assets"][0]["checksum"] = "0000000000000000";
    std::ofstream(dir.str("assets.json")) << manifest.dump();
    std::string err;
    CHECK(run(doc, "fetch", &err) == 2);
    CHECK(err.find("ChecksumMismatch") != std::string::npos);

    // Missing file -> exit 2 with the missing list in the report.
    manifest["assets"] = {{{"path", "ghost.bin"}, {"url", "https://example.invalid/ghost.bin"}}};
    std::ofstream(dir.str("assets.json")) << manifest.dump();
    CHECK(run(doc, "fetch", &err) == 2);
    CHECK(err.find("AssetMissing") != std::string::npos);
}

TEST_CASE("unknown commands and sections produce the error JSON contract") {
    TempDir dir("advmask_cmd_unknown");
    nlohmann::json doc = base_config(dir.str("out"));
    std::string err;
    CHECK(run(doc, "explode", &err) == 2);
    CHECK(err.find("InvalidConfig") != std::string::npos);
    CHECK(run(doc, "train", &err) == 2);  // no train section
}
