#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "advmask/commands.hpp"
#include "advmask/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"advmask - universal adversarial face-mask toolkit"};
    app.require_subcommand(1);

    struct CommonOpts {
        std::string config_path;
        std::string out_dir;
        std::uint64_t seed = 0;
        int workers = 0;
        bool seed_set = false;
        bool out_set = false;
        bool workers_set = false;
    };

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"train", "Optimize a universal or targeted adversarial mask"},
        {"eval", "Score mask conditions against enrolled galleries"},
        {"transfer", "Mean-cosine matrix across masks and models"},
        {"calibrate", "Pick the verification threshold at a target FAR"},
        {"simulate", "Run the frame-stream verification simulator"},
        {"defend", "Mask substitution / adversarial training data generation"},
        {"report", "Render box plots and heatmaps from result CSVs"},
        {"fetch", "Verify (and list missing) pretrained assets"},
    };

    std::map<std::string, CommonOpts> opts;
    for (const auto& [name, description] : commands) {
        CLI::App* sub = app.add_subcommand(name, description);
        CommonOpts& o = opts[name];
        sub->add_option("--config", o.config_path, "Path to the experiment config JSON")
            ->required();
        sub->add_option("--seed", o.seed, "Override the config's global seed")
            ->each([&o](const std::string&) { o.seed_set = true; });
        sub->add_option("--out", o.out_dir, "Override the output directory")
            ->each([&o](const std::string&) { o.out_set = true; });
        sub->add_option("--workers", o.workers, "Override the worker-thread cap")
            ->each([&o](const std::string&) { o.workers_set = true; });
    }

    CLI11_PARSE(app, argc, argv);

    const std::string name = app.get_subcommands().front()->get_name();
    const CommonOpts& o = opts[name];
    try {
        advmask::ExperimentConfig config = advmask::ExperimentConfig::from_file(o.config_path);
        if (o.seed_set) config.override_seed(o.seed);
        if (o.out_set) config.override_out_dir(o.out_dir);
        if (o.workers_set) config.override_workers(o.workers);
        return advmask::run_command(name, config, std::cout, std::cerr);
    } catch (const advmask::Error& e) {
        std::cerr << "{\"error\":\"" << e.code() << "\",\"message\":\"" << e.what() << "\"}\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "{\"error\":\"Internal\",\"message\":\"" << e.what() << "\"}\n";
        return 1;
    }
}
