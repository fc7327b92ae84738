#pragma once

#include "fxprobe/effects.h"
#include "fxprobe/encoders.h"
#include "fxprobe/loudness.h"
#include "fxprobe/probe.h"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace fxprobe {

enum class CorpusMode { synth, external };

struct CorpusConfig {
    CorpusMode mode = CorpusMode::synth;
    std::size_t n_per_instrument = 32;
    std::filesystem::path input_dir;
};

/// Everything a pipeline run depends on. Parsed strictly: unknown keys and
/// wrongly typed values are rejected before any work starts.
struct RunConfig {
    std::uint64_t seed = 0;
    CorpusConfig corpus;
    double target_lufs = kDefaultTargetLufs;
    EncoderConfig encoder;
    ProbeConfig probe;
    std::size_t mask_epochs = 100;
    MaskSpace mask_space = MaskSpace::normalized;
    bool shuffle_labels = false;
    bool project_normalize = false;
    std::vector<SweepSpec> sweep = default_sweeps();
    std::size_t sweep_clips_per_instrument = 16;
    std::filesystem::path output_dir = "fxprobe_out";

    void validate() const;
};

/// Relative paths in the document resolve against `base_dir`.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

/// FXPROBE_SEED, when set, replaces the config seed.
void apply_env_overrides(RunConfig& config);

/// Hex FNV-1a of a JSON value's canonical (sorted-key) serialization.
std::string content_hash(const nlohmann::json& j);

}  // namespace fxprobe
