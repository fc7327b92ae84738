#pragma once

#include "fxprobe/audio_io.h"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fxprobe {

/// The ten manipulation classes. Declaration order is the report column
/// order (alphabetical by abbreviation) and doubles as the class index.
enum class EffectId { CHS, CLN, CMP, DLY, DIS, HPF, LPF, PS, RVB, TRV };

inline constexpr std::size_t kNumEffects = 10;
inline constexpr std::array<EffectId, kNumEffects> kAllEffects = {
    EffectId::CHS, EffectId::CLN, EffectId::CMP, EffectId::DLY, EffectId::DIS,
    EffectId::HPF, EffectId::LPF, EffectId::PS,  EffectId::RVB, EffectId::TRV};

std::string_view effect_name(EffectId id);
/// Throws ValidationError for unknown names.
EffectId parse_effect(std::string_view name);
inline std::size_t effect_index(EffectId id) { return static_cast<std::size_t>(id); }

/// Effect identifier plus named parameters. Parameters missing from `params`
/// take the classification-setting value (see fixed_spec).
struct EffectSpec {
    EffectId id = EffectId::CLN;
    std::map<std::string, double> params;

    /// Parameter value, falling back to the classification setting default.
    double param(const std::string& name) const;
    /// Throws ValidationError for unknown parameter names or out-of-range values.
    void validate() const;

    bool operator==(const EffectSpec&) const = default;
};

/// Canonical parameter names for an effect, in a stable order.
const std::vector<std::string>& effect_param_names(EffectId id);

/// Fixed-parameter setting used for the classification experiments, with
/// every canonical parameter filled in.
EffectSpec fixed_spec(EffectId id);

enum class SweepScale { linear, log };

struct SweepSpec {
    EffectId id = EffectId::DIS;
    std::string param;
    double min = 0.0;
    double max = 1.0;
    int steps = 32;
    SweepScale scale = SweepScale::linear;

    void validate() const;
};

/// The four default parameter sweeps (DIS drive, RVB room size, HPF and LPF
/// cutoff on a log scale).
std::vector<SweepSpec> default_sweeps();

/// One spec per step; the swept parameter takes the grid value, all others
/// keep their fixed-setting defaults.
std::vector<EffectSpec> sweep_specs(const SweepSpec& sweep);
std::vector<double> sweep_values(const SweepSpec& sweep);

/// Applies one effect offline. Output length always equals input length.
AudioClip apply_effect(const AudioClip& clip, const EffectSpec& spec);

// Individual effect stages, exposed for testing.
namespace fx {
std::vector<float> chorus(std::span<const float> x, double fs, double rate_hz, double depth,
                          double centre_delay_ms, double feedback, double mix);
AudioClip compressor(const AudioClip& clip, double threshold_db, double ratio, double attack_ms,
                     double release_ms);
std::vector<float> delay(std::span<const float> x, double fs, double delay_s, double feedback,
                         double mix);
std::vector<float> distortion(std::span<const float> x, double drive_db);
std::vector<float> highpass(std::span<const float> x, double fs, double cutoff_hz);
std::vector<float> lowpass(std::span<const float> x, double fs, double cutoff_hz);
/// Pole coefficients of the one-pole filters.
double highpass_coefficient(double fs, double cutoff_hz);
double lowpass_coefficient(double fs, double cutoff_hz);
std::vector<float> pitch_shift(std::span<const float> x, double semitones);
/// Phase-vocoder time stretch; output length about x.size() * hs / ha.
std::vector<float> time_stretch(std::span<const float> x, std::size_t analysis_hop,
                                std::size_t synthesis_hop);
AudioClip reverb(const AudioClip& clip, double fs, double room_size, double damping, double wet,
                 double dry, double width);
}  // namespace fx

}  // namespace fxprobe
