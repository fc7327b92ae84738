#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace fxprobe {

inline constexpr double kSampleRate = 48000.0;
/// Corpus clip length: 2^18 samples, about 5.46 s at 48 kHz.
inline constexpr std::size_t kClipSamples = std::size_t{1} << 18;

/// Stereo buffer at a fixed sample rate. Both channels always have the same
/// length; mono material is stored doubled.
struct AudioClip {
    std::array<std::vector<float>, 2> channels;
    double sample_rate = kSampleRate;

    AudioClip() = default;
    AudioClip(std::vector<float> left, std::vector<float> right, double rate = kSampleRate);

    static AudioClip from_mono(std::vector<float> mono, double rate = kSampleRate);
    static AudioClip silence(std::size_t frames, double rate = kSampleRate);

    std::size_t frames() const { return channels[0].size(); }
    std::vector<float>& operator[](std::size_t c) { return channels[c]; }
    const std::vector<float>& operator[](std::size_t c) const { return channels[c]; }

    /// Throws ValidationError on unequal channel lengths or non-finite data.
    void validate() const;
    /// Mean of the two channels.
    std::vector<double> mono_mix() const;

    bool operator==(const AudioClip&) const = default;
};

/// Decodes PCM16, PCM24 or IEEE float32 WAV (mono or stereo). Mono input is
/// doubled; other sample rates are resampled to 48 kHz.
AudioClip read_wav(const std::filesystem::path& path);
AudioClip decode_wav(std::span<const std::uint8_t> bytes);

/// Writes a float32 stereo WAV. The file is written to a temporary sibling
/// and renamed into place.
void write_wav(const AudioClip& clip, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_wav(const AudioClip& clip);

/// Consecutive non-overlapping windows; a short remainder is dropped.
std::vector<AudioClip> slice_clips(const AudioClip& clip, std::size_t length_samples);

/// Windowed-sinc (64-tap Kaiser, beta 8.6) resampler. Output sample n is
/// the band-limited input evaluated at position n * step, so step > 1
/// shortens the signal. The cutoff follows min(1, 1/step) to avoid aliasing.
std::vector<float> sinc_resample(std::span<const float> in, double step, std::size_t out_len);
/// Rate conversion of a whole channel.
std::vector<float> resample_rate(std::span<const float> in, double from_hz, double to_hz);

}  // namespace fxprobe
