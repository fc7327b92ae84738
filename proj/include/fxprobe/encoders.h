#pragma once

#include "fxprobe/audio_io.h"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace fxprobe {

/// Encoder output: a frames x dims matrix stored row-major.
struct EmbeddingSequence {
    std::vector<float> data;
    std::size_t frames = 0;
    std::size_t dims = 0;
    double frame_rate_hz = 0.0;
    std::string encoder_id;

    std::span<const float> frame(std::size_t t) const { return {data.data() + t * dims, dims}; }
    /// Throws ValidationError on empty shape, size mismatch or non-finite data.
    void validate() const;

    bool operator==(const EmbeddingSequence&) const = default;
};

enum class EncoderKind { mel, random_projection, external };

struct MelParams {
    std::size_t n_fft = 2048;
    std::size_t hop = 512;
    std::size_t n_mels = 32;
    double fmin = 20.0;
    double fmax = 24000.0;
    double log_floor = 1e-8;
};

struct EncoderConfig {
    EncoderKind kind = EncoderKind::mel;
    MelParams mel;
    // random projection
    std::size_t projection_dims = 32;
    std::uint64_t projection_seed = 0;
    // external
    std::filesystem::path directory;

    /// Throws ConfigError on invalid settings.
    void validate() const;
    /// Stable identifier that changes whenever an output-affecting setting does.
    std::string encoder_id() const;
};

class Encoder {
public:
    virtual ~Encoder() = default;
    virtual EmbeddingSequence encode(const AudioClip& clip) const = 0;
    virtual std::string id() const = 0;
    virtual std::size_t dims() const = 0;
    virtual double frame_rate_hz() const = 0;
};

/// Log-mel spectrogram of the mono mix: STFT with one frame per hop block,
/// centred on that block (symmetric Hann, reflection padding, N / hop
/// frames), Slaney-style mel filterbank, log10(power + floor).
class MelEncoder : public Encoder {
public:
    explicit MelEncoder(const MelParams& params, std::string id = {});

    EmbeddingSequence encode(const AudioClip& clip) const override;
    std::string id() const override { return id_; }
    std::size_t dims() const override { return params_.n_mels; }
    double frame_rate_hz() const override { return kSampleRate / static_cast<double>(params_.hop); }

    /// Log-mel frames in double precision (frames x n_mels, row-major).
    std::vector<double> log_mel(const AudioClip& clip, std::size_t& frames) const;
    /// Centre frequency (Hz) of each mel band.
    const std::vector<double>& centre_frequencies() const { return centres_; }
    /// Dense filterbank weight, for tests.
    double weight(std::size_t band, std::size_t bin) const;

private:
    struct Band {
        std::size_t first_bin = 0;
        std::vector<double> weights;
    };
    MelParams params_;
    std::string id_;
    std::vector<Band> bands_;
    std::vector<double> centres_;
    std::vector<double> window_;
};

/// Log-mel frames multiplied by a seeded Gaussian matrix with entries
/// N(0, 1/n_mels).
class RandomProjectionEncoder : public Encoder {
public:
    RandomProjectionEncoder(const MelParams& params, std::size_t dims, std::uint64_t seed,
                            std::string id = {});

    EmbeddingSequence encode(const AudioClip& clip) const override;
    std::string id() const override { return id_; }
    std::size_t dims() const override { return dims_; }
    double frame_rate_hz() const override { return mel_.frame_rate_hz(); }

private:
    MelEncoder mel_;
    std::size_t dims_;
    std::string id_;
    std::vector<double> projection_;  // n_mels x dims, row-major
};

/// Builds an in-process encoder. External configs have no in-process
/// encoder and raise ConfigError.
std::unique_ptr<Encoder> make_encoder(const EncoderConfig& config);
EmbeddingSequence encode(const AudioClip& clip, const EncoderConfig& config);

double hz_to_mel_slaney(double hz);
double mel_to_hz_slaney(double mel);

// Embedding exchange format: meta.json + <clip_id>.f32 (little-endian float32,
// row-major frames x dims).

struct ExternalMeta {
    std::size_t dims = 0;
    double frame_rate_hz = 0.0;
    std::string encoder_id;

    bool operator==(const ExternalMeta&) const = default;
};

nlohmann::json to_json(const ExternalMeta& meta);
ExternalMeta read_external_meta(const std::filesystem::path& directory);
void write_external_meta(const std::filesystem::path& directory, const ExternalMeta& meta);
void write_embedding(const std::filesystem::path& directory, const std::string& clip_id,
                     const EmbeddingSequence& seq);
/// Reads one clip's embedding. CorruptionError when the byte count is not a
/// whole number of frames, ValidationError on NaN/Inf.
EmbeddingSequence read_embedding(const std::filesystem::path& directory, const ExternalMeta& meta,
                                 const std::string& clip_id);
/// Every <clip_id>.f32 in the directory, keyed by clip id.
std::map<std::string, EmbeddingSequence> load_external(const std::filesystem::path& directory);

}  // namespace fxprobe
