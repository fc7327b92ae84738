#pragma once

#include "fxprobe/audio_io.h"
#include "fxprobe/effects.h"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace fxprobe {

enum class Instrument { guitar_like, piano_like, external };
enum class Split { train, val, test };

std::string_view instrument_name(Instrument i);
Instrument parse_instrument(std::string_view s);
std::string_view split_name(Split s);
Split parse_split(std::string_view s);

struct ManifestEntry {
    std::string clip_id;
    std::string source_id;
    /// Audio path relative to the manifest's directory.
    std::string source;
    Instrument instrument = Instrument::external;
    EffectSpec effect;
    std::optional<double> param_value;
    Split split = Split::train;

    bool operator==(const ManifestEntry&) const = default;
};

struct CorpusManifest {
    std::uint64_t seed = 0;
    std::vector<ManifestEntry> entries;

    /// Throws DataError on duplicate clip ids, a source whose variants span
    /// several splits, or (when `require_all_effects`) a source missing any
    /// of the ten classes.
    void validate(bool require_all_effects) const;
    std::vector<std::string> source_ids() const;

    bool operator==(const CorpusManifest&) const = default;
};

nlohmann::json to_json(const EffectSpec& spec);
EffectSpec effect_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CorpusManifest& manifest);
CorpusManifest manifest_from_json(const nlohmann::json& j);
void save_manifest(const CorpusManifest& manifest, const std::filesystem::path& path);
CorpusManifest load_manifest(const std::filesystem::path& path);

/// Grouped split: each source clip is assigned whole to train/val/test.
/// Within each instrument, sources are shuffled and cut 80/10/10 (val and
/// test get at least one source each once an instrument has 3 or more).
std::vector<Split> assign_splits(const std::vector<Instrument>& source_instruments, std::uint64_t seed);

// Synthetic two-instrument corpus.

std::string synth_source_id(Instrument instrument, std::size_t index);
/// Plucked-string (Karplus-Strong) phrase, 2^18 samples, doubled to stereo.
AudioClip synth_guitar(std::uint64_t seed, std::size_t index);
/// Additive piano-like phrase, 2^18 samples, doubled to stereo.
AudioClip synth_piano(std::uint64_t seed, std::size_t index);
/// A single piano-like note: partials at f0..4f0 with amplitudes
/// 1, 1/2, 1/4, 1/8, each decaying exponentially (higher partials faster).
std::vector<double> piano_note(double f0, std::size_t samples, double fs = kSampleRate);

/// Writes n guitar-like and n piano-like source WAVs into `dir` and returns
/// a manifest holding one clean entry per source (splits assigned).
CorpusManifest synth_corpus(std::size_t n_per_instrument, std::uint64_t seed,
                            const std::filesystem::path& dir);

}  // namespace fxprobe
