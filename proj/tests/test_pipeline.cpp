#include "fxprobe/errors.h"
#include "fxprobe/pipeline.h"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace fxprobe;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig small_config(const fs::path& out) {
    RunConfig c;
    c.seed = 42;
    c.corpus.n_per_instrument = 4;
    c.output_dir = out;
    c.probe.max_epochs = 20;
    c.probe.patience = 20;
    c.mask_epochs = 5;
    c.sweep_clips_per_instrument = 1;
    for (auto& s : c.sweep) s.steps = 4;
    return c;
}

}  // namespace

TEST_CASE("small end-to-end pipeline") {
    const auto out = fs::temp_directory_path() / "fxprobe_pipeline";
    fs::remove_all(out);
    const auto config = small_config(out);
    std::vector<std::string> logs;
    RunOptions opts;
    opts.jobs = 2;
    opts.log = [&](const std::string& m) { logs.push_back(m); };

    const auto r = cmd_render(config, opts);
    REQUIRE(r.ok());
    const auto manifest = load_manifest(out / "manifest.json");
    CHECK(manifest.entries.size() == 80);
    manifest.validate(true);
    const std::string manifest_bytes = slurp(out / "manifest.json");

    // rerun is a no-op with identical output
    CHECK(cmd_render(config, opts).ok());
    CHECK(slurp(out / "manifest.json") == manifest_bytes);

    REQUIRE(cmd_encode(config, opts).ok());
    const fs::path emb = PipelinePaths{out}.embeddings(config);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(emb)) files += e.path().extension() == ".f32";
    CHECK(files == 80);
    CHECK(fs::file_size(emb / "guitar_0000.CLN.f32") == 16384 * 4);

    // a damaged embedding is re-encoded with a warning
    const std::string good = slurp(emb / "guitar_0000.CLN.f32");
    fs::resize_file(emb / "guitar_0000.CLN.f32", 1000);
    logs.clear();
    const auto again = cmd_encode(config, opts);
    CHECK(again.ok());
    CHECK(slurp(emb / "guitar_0000.CLN.f32") == good);
    bool warned = false;
    for (const auto& l : logs) warned |= l.find("warning") != std::string::npos && l.find("guitar_0000.CLN") != std::string::npos;
    CHECK(warned);

    CHECK(cmd_project(config, FeatureMode::timeavg, opts).ok());
    const std::string pca = slurp(out / "project" / "timeavg" / "pca_projection.csv");
    CHECK(pca.rfind("clip_id,instrument,effect,param_value,pc1,pc2,pc3\n", 0) == 0);
    CHECK(std::count(pca.begin(), pca.end(), '\n') == 81);

    const auto p = cmd_probe(config, FeatureMode::timeavg, opts);
    CHECK(p.result.ok());
    CHECK(p.parameter_count == 330);
    const std::string csv = slurp(out / "probe" / "timeavg" / "report.csv");
    CHECK(csv.rfind("encoder,mode,dim,probe_params,CHS,CLN,CMP,DLY,DIS,HPF,LPF,PS,RVB,TRV,AVG,AVG_overall\n", 0) == 0);
    CHECK(fs::exists(out / "probe" / "timeavg" / "report.json"));

    const auto m = cmd_mask(config, opts);
    CHECK(m.matrix.delta_pp.rows() == 9);
    CHECK(m.matrix.delta_pp.cols() == 32);
    CHECK(fs::exists(out / "mask" / "mask_matrix.csv"));

    const auto s = cmd_sweep(config, opts);
    CHECK(s.result.ok());
    CHECK(s.paths.size() == 8);  // 4 sweeps x 2 sources
    CHECK(s.summaries.size() == 4);
    for (const auto& path : s.paths) CHECK(path.report.pca3_path.rows() == 4);
    CHECK(fs::exists(out / "sweep" / "summary.csv"));
}

TEST_CASE("missing audio is reported with its clip id") {
    const auto out = fs::temp_directory_path() / "fxprobe_pipeline_missing";
    fs::remove_all(out);
    auto config = small_config(out);
    config.corpus.n_per_instrument = 1;
    REQUIRE(cmd_render(config).ok());
    fs::remove(out / "audio" / "piano_0000.DLY.wav");
    const auto r = cmd_encode(config);
    REQUIRE(r.failures.size() == 1);
    CHECK(r.failures[0].find("piano_0000.DLY") != std::string::npos);
}

TEST_CASE("pipeline errors") {
    const auto out = fs::temp_directory_path() / "fxprobe_pipeline_err";
    fs::remove_all(out);
    auto config = small_config(out);
    CHECK_THROWS_AS(cmd_encode(config), DataError);  // nothing rendered

    const auto empty = fs::temp_directory_path() / "fxprobe_empty_in";
    fs::remove_all(empty);
    fs::create_directories(empty);
    config.corpus.mode = CorpusMode::external;
    config.corpus.input_dir = empty;
    CHECK_THROWS_AS(cmd_render(config), DataError);

    auto ext = small_config(out);
    ext.encoder.kind = EncoderKind::external;
    ext.encoder.directory = empty;
    CHECK_THROWS_AS(cmd_sweep(ext), ConfigError);
}
