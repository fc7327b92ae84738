// fxprobe: render, encode, project, probe, mask and sweep from one config.
#include "fxprobe/errors.h"
#include "fxprobe/parallel.h"
#include "fxprobe/pipeline.h"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

using namespace fxprobe;

namespace {

int report(const CommandResult& result) {
    for (const auto& n : result.notes) std::cout << n << '\n';
    for (const auto& f : result.failures) std::cerr << "failed: " << f << '\n';
    if (!result.ok()) {
        std::cerr << result.failures.size() << " item(s) failed\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Audio-effect representation probing toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string mode_name = "timeavg";
    std::size_t jobs = 0;
    std::string out_dir;
    bool quiet = false;

    const auto add_common = [&](CLI::App* sub, bool with_mode) {
        sub->add_option("--config,-c", config_path, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--jobs,-j", jobs, "worker threads (default: all cores)");
        sub->add_option("--out,-o", out_dir, "output directory (overrides config)");
        sub->add_flag("--quiet,-q", quiet, "suppress progress messages");
        if (with_mode)
            sub->add_option("--mode,-m", mode_name, "feature mode")->check(CLI::IsMember({"timeavg", "flatten"}));
    };

    auto* render = app.add_subcommand("render", "synthesize or slice sources and apply the ten effects");
    auto* encode = app.add_subcommand("encode", "encode rendered clips into embeddings");
    auto* project = app.add_subcommand("project", "3-component PCA projection of all clips");
    auto* probe = app.add_subcommand("probe", "10-way linear effect probe");
    auto* mask = app.add_subcommand("mask", "per-dimension masking of binary effect probes");
    auto* sweep = app.add_subcommand("sweep", "parameter sweeps and trajectory straightness");
    add_common(render, false);
    add_common(encode, false);
    add_common(project, true);
    add_common(probe, true);
    add_common(mask, false);
    add_common(sweep, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        RunConfig config = load_run_config(config_path);
        apply_env_overrides(config);
        if (!out_dir.empty()) config.output_dir = out_dir;
        config.validate();

        RunOptions options;
        options.jobs = jobs ? jobs : default_jobs();
        if (!quiet) options.log = [](const std::string& msg) { std::cerr << msg << '\n'; };
        const FeatureMode mode = parse_feature_mode(mode_name);

        if (render->parsed()) return report(cmd_render(config, options));
        if (encode->parsed()) return report(cmd_encode(config, options));
        if (project->parsed()) return report(cmd_project(config, mode, options));
        if (probe->parsed()) return report(cmd_probe(config, mode, options).result);
        if (mask->parsed()) return report(cmd_mask(config, options).result);
        if (sweep->parsed()) return report(cmd_sweep(config, options).result);
    } catch (const Error& e) {
        std::cerr << "error (" << e.kind() << "): " << e.what() << '\n';
        return is_validation_error(e) ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
