#include "fxprobe/corpus.h"
#include "fxprobe/effects.h"
#include "fxprobe/encoders.h"
#include "fxprobe/errors.h"
#include "fxprobe/represent.h"
#include "fxprobe/rng.h"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace fxprobe;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

// Slaney mel scale written out from its definition: linear below 1 kHz
// (200/3 Hz per mel), logarithmic above with 27 mels per factor 6.4.
double slaney_mel(double f) {
    return f < 1000 ? f / (200.0 / 3) : 15 + 27 * std::log(f / 1000) / std::log(6.4);
}
double slaney_hz(double m) {
    return m < 15 ? m * 200.0 / 3 : 1000 * std::exp((m - 15) * std::log(6.4) / 27);
}

void write_raw(const fs::path& p, const std::vector<float>& v) {
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * 4));
}

double norm(const Vector& v) { return v.norm(); }

}  // namespace

TEST_CASE("slaney mel conversion") {
    CHECK(hz_to_mel_slaney(1000) == doctest::Approx(15.0));
    CHECK(hz_to_mel_slaney(6400) == doctest::Approx(42.0));
    for (double f : {20.0, 440.0, 999.0, 1000.0, 3000.0, 24000.0}) {
        CHECK(hz_to_mel_slaney(f) == doctest::Approx(slaney_mel(f)));
        CHECK(mel_to_hz_slaney(hz_to_mel_slaney(f)) == doctest::Approx(f));
    }
}

TEST_CASE("default clip encodes to 512 x 32") {
    const auto seq = encode(synth_guitar(1, 0), EncoderConfig{});
    CHECK(seq.frames == 512);
    CHECK(seq.dims == 32);
    CHECK(seq.frame_rate_hz == doctest::Approx(93.75));
    CHECK(flatten(seq).size() == 16384);
    CHECK(seq.encoder_id == "mel32_fft2048_hop512_20-24000hz_floor1e-08");
    seq.validate();
}

TEST_CASE("silence encodes to the log floor everywhere") {
    const auto seq = encode(AudioClip::silence(kClipSamples), EncoderConfig{});
    for (float v : seq.data) REQUIRE(v == static_cast<float>(std::log10(1e-8)));
}

TEST_CASE("a 1 kHz sine peaks in the band centred nearest 1 kHz") {
    MelParams p;
    // centres from the definition: n_mels + 2 equally spaced mel points
    const double lo = slaney_mel(p.fmin), hi = slaney_mel(p.fmax);
    std::size_t nearest = 0;
    double best = 1e300;
    for (std::size_t k = 0; k < p.n_mels; ++k) {
        const double c = slaney_hz(lo + (hi - lo) * static_cast<double>(k + 1) / static_cast<double>(p.n_mels + 1));
        if (std::abs(c - 1000) < best) best = std::abs(c - 1000), nearest = k;
    }
    const MelEncoder enc(p);
    CHECK(enc.centre_frequencies()[nearest] == doctest::Approx(slaney_hz(lo + (hi - lo) * (nearest + 1.0) / 33)));

    std::vector<float> x(kClipSamples);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<float>(0.5 * std::sin(2 * std::numbers::pi * 1000 * i / 48000.0));
    const auto seq = enc.encode(AudioClip::from_mono(x));
    for (std::size_t t = 4; t + 4 < seq.frames; ++t) {
        const auto f = seq.frame(t);
        const auto arg = static_cast<std::size_t>(std::max_element(f.begin(), f.end()) - f.begin());
        REQUIRE(arg == nearest);
    }
}

TEST_CASE("filterbank triangles are area normalized") {
    const MelEncoder enc(MelParams{});
    // Slaney normalization: each triangle's peak is 2 / (upper - lower edge)
    const double lo = slaney_mel(20), hi = slaney_mel(24000);
    for (std::size_t b : {0u, 10u, 31u}) {
        const double lower = slaney_hz(lo + (hi - lo) * b / 33.0);
        const double upper = slaney_hz(lo + (hi - lo) * (b + 2) / 33.0);
        double peak = 0;
        for (std::size_t k = 0; k <= 1024; ++k) peak = std::max(peak, enc.weight(b, k));
        CHECK(peak <= 2.0 / (upper - lower) * (1 + 1e-9));
        CHECK(peak > 0.5 * 2.0 / (upper - lower));
    }
}

TEST_CASE("time averaging makes the mel encoder nearly blind to reversal") {
    for (const auto& clip : {synth_guitar(3, 1), synth_piano(3, 2)}) {
        const Vector a = time_average(encode(clip, EncoderConfig{}));
        const Vector b = time_average(encode(apply_effect(clip, fixed_spec(EffectId::TRV)), EncoderConfig{}));
        CHECK(norm(a - b) <= 1e-3 * norm(a));
    }
}

TEST_CASE("random projection roughly preserves distances") {
    EncoderConfig mel;
    EncoderConfig rp;
    rp.kind = EncoderKind::random_projection;
    rp.projection_dims = 32;
    rp.projection_seed = 5;
    std::vector<Vector> a, b;
    for (std::size_t i = 0; i < 8; ++i) {
        const auto clip = i % 2 ? synth_piano(11, i) : synth_guitar(11, i);
        a.push_back(time_average(encode(clip, mel)));
        b.push_back(time_average(encode(clip, rp)));
    }
    std::vector<double> da, db;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            da.push_back((a[i] - a[j]).norm());
            db.push_back((b[i] - b[j]).norm());
        }
    const auto n = static_cast<double>(da.size());
    double ma = 0, mb = 0;
    for (std::size_t k = 0; k < da.size(); ++k) ma += da[k] / n, mb += db[k] / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t k = 0; k < da.size(); ++k) {
        sab += (da[k] - ma) * (db[k] - mb);
        saa += (da[k] - ma) * (da[k] - ma);
        sbb += (db[k] - mb) * (db[k] - mb);
    }
    CHECK(sab / std::sqrt(saa * sbb) > 0.9);
    // same seed, same output
    CHECK(encode(synth_guitar(11, 0), rp) == encode(synth_guitar(11, 0), rp));
}

TEST_CASE("encoder config validation") {
    EncoderConfig c;
    c.mel.n_mels = 4;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.mel.n_fft = 1000;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.mel.hop = 500;  // does not divide 2^18
    CHECK_THROWS_AS(encode(synth_guitar(1, 0), c), ConfigError);
    c = {};
    c.kind = EncoderKind::external;
    c.directory = "x";
    CHECK_THROWS_AS(make_encoder(c), ConfigError);
    EncoderConfig other;
    other.mel.n_mels = 64;
    CHECK(other.encoder_id() != EncoderConfig{}.encoder_id());
}

TEST_CASE("embedding exchange format") {
    const auto dir = fresh_dir("fxprobe_emb");
    const ExternalMeta meta{32, 93.75, "ext"};
    write_external_meta(dir, meta);
    CHECK(read_external_meta(dir) == meta);

    write_raw(dir / "a.f32", std::vector<float>(16384, 0.5f));
    const auto a = read_embedding(dir, meta, "a");
    CHECK(a.frames == 512);
    CHECK(a.dims == 32);

    const ExternalMeta wide{64, 23.4375, "ext64"};
    const auto dir64 = fresh_dir("fxprobe_emb64");
    write_external_meta(dir64, wide);
    write_raw(dir64 / "b.f32", std::vector<float>(131072, 1.0f));
    const auto b = read_embedding(dir64, wide, "b");
    CHECK(b.frames == 2048);
    CHECK(flatten(b).size() == 131072);

    write_raw(dir / "trunc.f32", std::vector<float>(16383, 0.0f));
    CHECK_THROWS_AS(read_embedding(dir, meta, "trunc"), CorruptionError);
    std::vector<float> bad(64, 0.0f);
    bad[7] = std::nanf("");
    write_raw(dir / "nan.f32", bad);
    CHECK_THROWS_AS(read_embedding(dir, meta, "nan"), ValidationError);

    const auto seq = encode(synth_piano(2, 0), EncoderConfig{});
    write_embedding(dir, "rt", seq);
    auto back = read_embedding(dir, ExternalMeta{seq.dims, seq.frame_rate_hz, seq.encoder_id}, "rt");
    CHECK(back.data == seq.data);
    CHECK(back.frames == seq.frames);

    const auto all = load_external(dir64);
    CHECK(all.size() == 1);
    CHECK(all.count("b") == 1);
}
