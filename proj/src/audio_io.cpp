#include "fxprobe/audio_io.h"

#include "fxprobe/errors.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace fxprobe {

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes a little-endian host");

AudioClip::AudioClip(std::vector<float> left, std::vector<float> right, double rate)
    : channels{std::move(left), std::move(right)}, sample_rate(rate) {
    if (channels[0].size() != channels[1].size())
        throw ValidationError("channel lengths differ");
}

AudioClip AudioClip::from_mono(std::vector<float> mono, double rate) {
    std::vector<float> copy = mono;
    return AudioClip(std::move(mono), std::move(copy), rate);
}

AudioClip AudioClip::silence(std::size_t frames, double rate) {
    return AudioClip(std::vector<float>(frames, 0.0f), std::vector<float>(frames, 0.0f), rate);
}

void AudioClip::validate() const {
    if (channels[0].size() != channels[1].size()) throw ValidationError("channel lengths differ");
    for (const auto& ch : channels)
        for (float s : ch)
            if (!std::isfinite(s)) throw ValidationError("non-finite sample in clip");
}

std::vector<double> AudioClip::mono_mix() const {
    std::vector<double> out(frames());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = 0.5 * (static_cast<double>(channels[0][i]) + static_cast<double>(channels[1][i]));
    return out;
}

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <class T>
T read_le(const std::uint8_t* p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return v;
}

template <class T>
void put_le(std::vector<std::uint8_t>& out, T v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    out.insert(out.end(), p, p + sizeof(T));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
    out.insert(out.end(), tag, tag + 4);
}

}  // namespace

AudioClip decode_wav(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw FormatError("not a RIFF/WAVE file");

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    std::span<const std::uint8_t> data;
    bool have_data = false;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::uint8_t* chunk = bytes.data() + pos;
        const std::uint32_t size = read_le<std::uint32_t>(chunk + 4);
        const std::size_t body = pos + 8;
        if (body + size > bytes.size()) {
            // tolerate a data chunk whose declared size overruns the file
            if (std::memcmp(chunk, "data", 4) == 0) {
                data = bytes.subspan(body);
                have_data = true;
                break;
            }
            throw FormatError("chunk overruns file");
        }
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (size < 16) throw FormatError("fmt chunk too short");
            format = read_le<std::uint16_t>(chunk + 8);
            channels = read_le<std::uint16_t>(chunk + 10);
            rate = read_le<std::uint32_t>(chunk + 12);
            bits = read_le<std::uint16_t>(chunk + 22);
            if (format == kFormatExtensible) {
                if (size < 40) throw FormatError("extensible fmt chunk too short");
                format = read_le<std::uint16_t>(chunk + 8 + 24);
            }
            have_fmt = true;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            data = bytes.subspan(body, size);
            have_data = true;
        }
        pos = body + size + (size & 1u);
    }
    if (!have_fmt || !have_data) throw FormatError("missing fmt or data chunk");
    if (channels != 1 && channels != 2)
        throw UnsupportedError("unsupported channel count " + std::to_string(channels));
    if (rate == 0) throw FormatError("zero sample rate");

    const bool pcm16 = format == kFormatPcm && bits == 16;
    const bool pcm24 = format == kFormatPcm && bits == 24;
    const bool f32 = format == kFormatFloat && bits == 32;
    if (!pcm16 && !pcm24 && !f32)
        throw UnsupportedError("unsupported WAV encoding (format " + std::to_string(format) +
                               ", " + std::to_string(bits) + " bits)");

    const std::size_t width = bits / 8;
    const std::size_t frames = data.size() / (width * channels);
    std::array<std::vector<float>, 2> ch;
    for (std::size_t c = 0; c < channels; ++c) ch[c].resize(frames);

    for (std::size_t i = 0; i < frames; ++i) {
        for (std::size_t c = 0; c < channels; ++c) {
            const std::uint8_t* p = data.data() + (i * channels + c) * width;
            float v;
            if (pcm16) {
                v = static_cast<float>(read_le<std::int16_t>(p) / 32768.0);
            } else if (pcm24) {
                std::int32_t s = static_cast<std::int32_t>(p[0]) | (static_cast<std::int32_t>(p[1]) << 8) |
                                 (static_cast<std::int32_t>(p[2]) << 16);
                if (s & 0x800000) s -= 0x1000000;
                v = static_cast<float>(s / 8388608.0);
            } else {
                v = read_le<float>(p);
            }
            ch[c][i] = v;
        }
    }
    if (channels == 1) ch[1] = ch[0];

    if (static_cast<double>(rate) != kSampleRate) {
        for (auto& c : ch) c = resample_rate(c, rate, kSampleRate);
    }
    AudioClip clip(std::move(ch[0]), std::move(ch[1]), kSampleRate);
    clip.validate();
    return clip;
}

AudioClip read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_wav(bytes);
}

std::vector<std::uint8_t> encode_wav(const AudioClip& clip) {
    if (clip.channels[0].size() != clip.channels[1].size())
        throw ValidationError("channel lengths differ");
    const std::uint32_t frames = static_cast<std::uint32_t>(clip.frames());
    const std::uint32_t data_bytes = frames * 2u * 4u;
    const std::uint32_t rate = static_cast<std::uint32_t>(std::lround(clip.sample_rate));

    std::vector<std::uint8_t> out;
    out.reserve(58 + data_bytes);
    put_tag(out, "RIFF");
    put_le<std::uint32_t>(out, 4 + (8 + 18) + (8 + 4) + (8 + data_bytes));
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_le<std::uint32_t>(out, 18);
    put_le<std::uint16_t>(out, kFormatFloat);
    put_le<std::uint16_t>(out, 2);
    put_le<std::uint32_t>(out, rate);
    put_le<std::uint32_t>(out, rate * 8u);
    put_le<std::uint16_t>(out, 8);
    put_le<std::uint16_t>(out, 32);
    put_le<std::uint16_t>(out, 0);
    put_tag(out, "fact");
    put_le<std::uint32_t>(out, 4);
    put_le<std::uint32_t>(out, frames);
    put_tag(out, "data");
    put_le<std::uint32_t>(out, data_bytes);
    for (std::uint32_t i = 0; i < frames; ++i) {
        put_le<float>(out, clip.channels[0][i]);
        put_le<float>(out, clip.channels[1][i]);
    }
    return out;
}

void write_wav(const AudioClip& clip, const std::filesystem::path& path) {
    if (path.empty()) throw IoError("empty output path");
    const auto bytes = encode_wav(clip);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + path.string());
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failed for " + path.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move into place " + path.string() + ": " + ec.message());
}

std::vector<AudioClip> slice_clips(const AudioClip& clip, std::size_t length_samples) {
    if (length_samples < 1) throw ValidationError("slice length must be >= 1");
    std::vector<AudioClip> out;
    const std::size_t count = clip.frames() / length_samples;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const auto begin = static_cast<std::ptrdiff_t>(k * length_samples);
        const auto end = begin + static_cast<std::ptrdiff_t>(length_samples);
        out.emplace_back(std::vector<float>(clip[0].begin() + begin, clip[0].begin() + end),
                         std::vector<float>(clip[1].begin() + begin, clip[1].begin() + end),
                         clip.sample_rate);
    }
    return out;
}

}  // namespace fxprobe
