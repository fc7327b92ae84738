#pragma once

#include "fxprobe/config.h"
#include "fxprobe/corpus.h"
#include "fxprobe/probe.h"
#include "fxprobe/represent.h"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace fxprobe {

/// Outcome of a subcommand. Per-clip failures are isolated: other clips'
/// outputs are still written and `failures` lists what went wrong.
struct CommandResult {
    std::vector<std::string> failures;
    std::vector<std::string> notes;
    bool ok() const { return failures.empty(); }
};

struct PipelinePaths {
    std::filesystem::path root;
    std::filesystem::path manifest() const { return root / "manifest.json"; }
    std::filesystem::path sources() const { return root / "sources"; }
    std::filesystem::path audio() const { return root / "audio"; }
    std::filesystem::path stamps() const { return root / ".stamps"; }
    std::filesystem::path embeddings(const RunConfig& config) const;
    std::filesystem::path project(FeatureMode mode) const { return root / "project" / feature_mode_name(mode); }
    std::filesystem::path probe(FeatureMode mode) const { return root / "probe" / feature_mode_name(mode); }
    std::filesystem::path mask() const { return root / "mask"; }
    std::filesystem::path sweep() const { return root / "sweep"; }
};

using LogFn = std::function<void(const std::string&)>;

struct RunOptions {
    std::size_t jobs = 1;
    LogFn log;  // optional progress/warning sink
};

/// Sources (synthetic or sliced external audio) are loudness-normalized,
/// passed through the ten fixed effect settings, normalized again and
/// written with a manifest.
CommandResult cmd_render(const RunConfig& config, const RunOptions& options = {});

/// Encodes every manifest clip into the embedding exchange format. Existing
/// valid files are kept; invalid ones are re-encoded.
CommandResult cmd_encode(const RunConfig& config, const RunOptions& options = {});

/// Fits a 3-component PCA on all clips and writes pca_projection.csv.
CommandResult cmd_project(const RunConfig& config, FeatureMode mode, const RunOptions& options = {});

struct ProbeRun {
    CommandResult result;
    EvalReport report;
    std::size_t feature_dim = 0;
    std::size_t parameter_count = 0;
    std::size_t best_epoch = 0;
    std::size_t epochs_run = 0;
};

/// 10-way effect classification probe on the manifest splits.
ProbeRun cmd_probe(const RunConfig& config, FeatureMode mode, const RunOptions& options = {});

struct MaskRun {
    CommandResult result;
    MaskMatrix matrix;
};

/// Binary effect-vs-clean probes with one time-averaged dimension masked at
/// a time.
MaskRun cmd_mask(const RunConfig& config, const RunOptions& options = {});

struct SweepPath {
    std::string sweep;
    std::string source_id;
    Instrument instrument = Instrument::external;
    std::vector<double> values;
    TrajectoryReport report;
};

struct SweepSummary {
    std::string sweep;
    std::size_t paths = 0;
    double median = 0.0, mean = 0.0, min = 0.0, max = 0.0;
    bool all_below_one = false;
};

struct SweepRun {
    CommandResult result;
    std::vector<SweepPath> paths;
    std::vector<SweepSummary> summaries;
};

/// Renders every configured parameter sweep on the first N sources per
/// instrument, time-averages the embeddings and measures path straightness.
SweepRun cmd_sweep(const RunConfig& config, const RunOptions& options = {});

// Building blocks shared with tests.

std::string sweep_name(const SweepSpec& sweep);

/// Time-averaged or flattened features for every manifest entry, in
/// manifest order.
FeatureMatrix load_features(const RunConfig& config, const CorpusManifest& manifest, FeatureMode mode);

/// Per-effect binary tasks (effect = 1, clean = 0) from a feature matrix
/// aligned with `effects` and `splits`.
std::vector<BinaryTask> build_binary_tasks(const Matrix& features, const std::vector<EffectId>& effects,
                                           const std::vector<Split>& splits);

/// Table-3-style CSV of one report row.
std::string report_csv(const std::string& encoder_id, FeatureMode mode, std::size_t dim,
                       std::size_t parameter_count, const EvalReport& report);

}  // namespace fxprobe
