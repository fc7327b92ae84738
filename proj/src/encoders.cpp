#include "fxprobe/encoders.h"

#include "fxprobe/errors.h"
#include "fxprobe/fft.h"
#include "fxprobe/kernels.h"
#include "fxprobe/rng.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace fxprobe {

void EmbeddingSequence::validate() const {
    if (frames < 1 || dims < 1) throw ValidationError("embedding must have frames >= 1 and dims >= 1");
    if (data.size() != frames * dims) throw ValidationError("embedding data size does not match shape");
    for (float v : data)
        if (!std::isfinite(v)) throw ValidationError("non-finite embedding entry");
}

void EncoderConfig::validate() const {
    switch (kind) {
    case EncoderKind::mel:
    case EncoderKind::random_projection:
        if (mel.n_fft < 2 || (mel.n_fft & (mel.n_fft - 1)) != 0)
            throw ConfigError("n_fft must be a power of two");
        if (mel.hop < 1 || mel.hop > mel.n_fft) throw ConfigError("hop must be in [1, n_fft]");
        if (mel.n_mels < 8 || mel.n_mels > 256) throw ConfigError("n_mels must be in [8, 256]");
        if (!(mel.fmin >= 0.0) || !(mel.fmax > mel.fmin) || mel.fmax > kSampleRate / 2)
            throw ConfigError("mel range must satisfy 0 <= fmin < fmax <= 24000");
        if (!(mel.log_floor > 0.0)) throw ConfigError("log_floor must be > 0");
        if (kind == EncoderKind::random_projection && projection_dims < 1)
            throw ConfigError("random projection dims must be >= 1");
        break;
    case EncoderKind::external:
        if (directory.empty()) throw ConfigError("external encoder needs a directory");
        break;
    }
}

std::string EncoderConfig::encoder_id() const {
    char buf[160];
    switch (kind) {
    case EncoderKind::mel:
        std::snprintf(buf, sizeof(buf), "mel%zu_fft%zu_hop%zu_%g-%ghz_floor%g", mel.n_mels, mel.n_fft,
                      mel.hop, mel.fmin, mel.fmax, mel.log_floor);
        return buf;
    case EncoderKind::random_projection:
        std::snprintf(buf, sizeof(buf), "rp%zu_seed%llu_mel%zu_fft%zu_hop%zu_%g-%ghz_floor%g", projection_dims,
                      static_cast<unsigned long long>(projection_seed), mel.n_mels, mel.n_fft, mel.hop,
                      mel.fmin, mel.fmax, mel.log_floor);
        return buf;
    case EncoderKind::external:
        return "external";
    }
    return "unknown";
}

double hz_to_mel_slaney(double hz) {
    constexpr double f_sp = 200.0 / 3.0;
    constexpr double min_log_hz = 1000.0;
    constexpr double min_log_mel = min_log_hz / f_sp;
    const double logstep = std::log(6.4) / 27.0;
    if (hz < min_log_hz) return hz / f_sp;
    return min_log_mel + std::log(hz / min_log_hz) / logstep;
}

double mel_to_hz_slaney(double mel) {
    constexpr double f_sp = 200.0 / 3.0;
    constexpr double min_log_hz = 1000.0;
    constexpr double min_log_mel = min_log_hz / f_sp;
    const double logstep = std::log(6.4) / 27.0;
    if (mel < min_log_mel) return mel * f_sp;
    return min_log_hz * std::exp(logstep * (mel - min_log_mel));
}

MelEncoder::MelEncoder(const MelParams& params, std::string id) : params_(params), id_(std::move(id)) {
    EncoderConfig cfg;
    cfg.mel = params;
    cfg.validate();
    if (id_.empty()) id_ = cfg.encoder_id();

    const std::size_t bins = params.n_fft / 2 + 1;
    const double mel_lo = hz_to_mel_slaney(params.fmin);
    const double mel_hi = hz_to_mel_slaney(params.fmax);
    std::vector<double> edges(params.n_mels + 2);
    for (std::size_t i = 0; i < edges.size(); ++i)
        edges[i] = mel_to_hz_slaney(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                                 static_cast<double>(params.n_mels + 1));

    bands_.resize(params.n_mels);
    centres_.resize(params.n_mels);
    for (std::size_t m = 0; m < params.n_mels; ++m) {
        const double lo = edges[m], centre = edges[m + 1], hi = edges[m + 2];
        const double enorm = 2.0 / (hi - lo);
        centres_[m] = centre;
        Band band;
        bool started = false;
        for (std::size_t b = 0; b < bins; ++b) {
            const double f = static_cast<double>(b) * kSampleRate / static_cast<double>(params.n_fft);
            const double w = std::max(0.0, std::min((f - lo) / (centre - lo), (hi - f) / (hi - centre)));
            if (w > 0.0 && !started) {
                band.first_bin = b;
                started = true;
            }
            if (started) {
                if (w <= 0.0 && f > centre) break;
                band.weights.push_back(w * enorm);
            }
        }
        bands_[m] = std::move(band);
    }

    window_.resize(params.n_fft);
    for (std::size_t i = 0; i < params.n_fft; ++i)
        window_[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                           static_cast<double>(params.n_fft - 1));
}

double MelEncoder::weight(std::size_t band, std::size_t bin) const {
    const Band& b = bands_.at(band);
    if (bin < b.first_bin || bin >= b.first_bin + b.weights.size()) return 0.0;
    return b.weights[bin - b.first_bin];
}

std::vector<double> MelEncoder::log_mel(const AudioClip& clip, std::size_t& frames) const {
    const std::size_t n = clip.frames();
    if (n == 0 || n % params_.hop != 0)
        throw ConfigError("hop " + std::to_string(params_.hop) + " does not divide clip length " +
                          std::to_string(n));
    frames = n / params_.hop;
    const std::size_t nfft = params_.n_fft;
    const std::size_t half = nfft / 2;
    const std::size_t bins = half + 1;

    // Frame t covers hop block t at its centre: with a symmetric window the
    // frame set maps onto itself under time reversal.
    const std::size_t pad = half - params_.hop / 2;
    const auto mono = clip.mono_mix();
    if (n <= pad) throw LengthError("clip too short for reflection padding");
    std::vector<double> padded(n + 2 * pad);
    for (std::size_t i = 0; i < padded.size(); ++i) {
        const auto j = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(pad);
        std::ptrdiff_t k = j < 0 ? -j : j;
        const auto last = static_cast<std::ptrdiff_t>(n) - 1;
        if (k > last) k = 2 * last - k;
        padded[i] = mono[static_cast<std::size_t>(k)];
    }

    RealFft fft(nfft);
    std::vector<double> buf(nfft);
    std::vector<std::complex<double>> spec(bins);
    std::vector<double> power(bins);
    std::vector<double> out(frames * params_.n_mels);
    for (std::size_t t = 0; t < frames; ++t) {
        const double* src = padded.data() + t * params_.hop;
        for (std::size_t i = 0; i < nfft; ++i) buf[i] = src[i] * window_[i];
        fft.forward(buf, spec);
        for (std::size_t b = 0; b < bins; ++b) power[b] = std::norm(spec[b]);
        for (std::size_t m = 0; m < params_.n_mels; ++m) {
            const Band& band = bands_[m];
            const double e = band.weights.empty()
                                 ? 0.0
                                 : kernels::dot(band.weights, std::span<const double>(power).subspan(
                                                                  band.first_bin, band.weights.size()));
            out[t * params_.n_mels + m] = std::log10(e + params_.log_floor);
        }
    }
    return out;
}

EmbeddingSequence MelEncoder::encode(const AudioClip& clip) const {
    EmbeddingSequence seq;
    const auto values = log_mel(clip, seq.frames);
    seq.dims = params_.n_mels;
    seq.data.assign(values.size(), 0.0f);
    std::transform(values.begin(), values.end(), seq.data.begin(), [](double v) { return static_cast<float>(v); });
    seq.frame_rate_hz = frame_rate_hz();
    seq.encoder_id = id_;
    return seq;
}

RandomProjectionEncoder::RandomProjectionEncoder(const MelParams& params, std::size_t dims,
                                                 std::uint64_t seed, std::string id)
    : mel_(params), dims_(dims), id_(std::move(id)) {
    if (dims < 1) throw ConfigError("random projection dims must be >= 1");
    if (id_.empty()) {
        EncoderConfig cfg;
        cfg.kind = EncoderKind::random_projection;
        cfg.mel = params;
        cfg.projection_dims = dims;
        cfg.projection_seed = seed;
        id_ = cfg.encoder_id();
    }
    // stored transposed (dims x n_mels) so each output is a contiguous dot
    Rng rng(seed, "encoder.random_projection");
    const double scale = std::sqrt(1.0 / static_cast<double>(params.n_mels));
    std::vector<double> g(params.n_mels * dims);
    for (double& v : g) v = rng.normal() * scale;
    projection_.resize(g.size());
    for (std::size_t m = 0; m < params.n_mels; ++m)
        for (std::size_t d = 0; d < dims; ++d) projection_[d * params.n_mels + m] = g[m * dims + d];
}

EmbeddingSequence RandomProjectionEncoder::encode(const AudioClip& clip) const {
    EmbeddingSequence seq;
    const auto mel = mel_.log_mel(clip, seq.frames);
    const std::size_t n_mels = mel_.dims();
    seq.dims = dims_;
    seq.data.resize(seq.frames * dims_);
    for (std::size_t t = 0; t < seq.frames; ++t) {
        const std::span<const double> row(mel.data() + t * n_mels, n_mels);
        for (std::size_t d = 0; d < dims_; ++d)
            seq.data[t * dims_ + d] = static_cast<float>(
                kernels::dot(row, std::span<const double>(projection_.data() + d * n_mels, n_mels)));
    }
    seq.frame_rate_hz = frame_rate_hz();
    seq.encoder_id = id_;
    return seq;
}

std::unique_ptr<Encoder> make_encoder(const EncoderConfig& config) {
    config.validate();
    switch (config.kind) {
    case EncoderKind::mel:
        return std::make_unique<MelEncoder>(config.mel, config.encoder_id());
    case EncoderKind::random_projection:
        return std::make_unique<RandomProjectionEncoder>(config.mel, config.projection_dims,
                                                         config.projection_seed, config.encoder_id());
    case EncoderKind::external:
        throw ConfigError("external embeddings are loaded, not computed in-process");
    }
    throw ConfigError("unknown encoder kind");
}

EmbeddingSequence encode(const AudioClip& clip, const EncoderConfig& config) {
    return make_encoder(config)->encode(clip);
}

// --- exchange format -------------------------------------------------------

nlohmann::json to_json(const ExternalMeta& meta) {
    return {{"dims", meta.dims},
            {"frame_rate_hz", meta.frame_rate_hz},
            {"encoder_id", meta.encoder_id},
            {"dtype", "f32le"},
            {"layout", "row-major frames×dims"}};
}

ExternalMeta read_external_meta(const std::filesystem::path& directory) {
    const auto path = directory / "meta.json";
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        nlohmann::json j;
        in >> j;
        ExternalMeta meta;
        meta.dims = j.at("dims").get<std::size_t>();
        meta.frame_rate_hz = j.at("frame_rate_hz").get<double>();
        meta.encoder_id = j.at("encoder_id").get<std::string>();
        if (j.contains("dtype") && j.at("dtype").get<std::string>() != "f32le")
            throw UnsupportedError("unsupported embedding dtype " + j.at("dtype").get<std::string>());
        if (meta.dims < 1) throw ValidationError("meta.json: dims must be >= 1");
        return meta;
    } catch (const nlohmann::json::exception& ex) {
        throw FormatError("malformed meta.json: " + std::string(ex.what()));
    }
}

void write_external_meta(const std::filesystem::path& directory, const ExternalMeta& meta) {
    std::filesystem::create_directories(directory);
    const auto path = directory / "meta.json";
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw IoError("cannot write " + path.string());
        out << to_json(meta).dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

void write_embedding(const std::filesystem::path& directory, const std::string& clip_id,
                     const EmbeddingSequence& seq) {
    seq.validate();
    const auto path = directory / (clip_id + ".f32");
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + path.string());
        out.write(reinterpret_cast<const char*>(seq.data.data()),
                  static_cast<std::streamsize>(seq.data.size() * sizeof(float)));
        if (!out) throw IoError("write failed for " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

EmbeddingSequence read_embedding(const std::filesystem::path& directory, const ExternalMeta& meta,
                                 const std::string& clip_id) {
    const auto path = directory / (clip_id + ".f32");
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("cannot open " + path.string());
    const auto bytes = static_cast<std::size_t>(in.tellg());
    const std::size_t row_bytes = meta.dims * sizeof(float);
    if (bytes == 0 || bytes % row_bytes != 0)
        throw CorruptionError(path.string() + ": size " + std::to_string(bytes) +
                              " is not a whole number of " + std::to_string(meta.dims) + "-dim frames");
    EmbeddingSequence seq;
    seq.dims = meta.dims;
    seq.frames = bytes / row_bytes;
    seq.frame_rate_hz = meta.frame_rate_hz;
    seq.encoder_id = meta.encoder_id;
    seq.data.resize(seq.frames * seq.dims);
    in.seekg(0);
    in.read(reinterpret_cast<char*>(seq.data.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw IoError("read failed for " + path.string());
    for (float v : seq.data)
        if (!std::isfinite(v)) throw ValidationError(path.string() + ": non-finite embedding entry");
    return seq;
}

std::map<std::string, EmbeddingSequence> load_external(const std::filesystem::path& directory) {
    const ExternalMeta meta = read_external_meta(directory);
    std::map<std::string, EmbeddingSequence> out;
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".f32") continue;
        const std::string clip_id = entry.path().stem().string();
        out.emplace(clip_id, read_embedding(directory, meta, clip_id));
    }
    return out;
}

}  // namespace fxprobe
