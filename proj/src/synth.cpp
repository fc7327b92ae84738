#include "fxprobe/corpus.h"

#include "fxprobe/errors.h"
#include "fxprobe/rng.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>

namespace fxprobe {

namespace {

constexpr double kPeak = 0.5;
constexpr double kNoiseFloorDb = -45.0;  // relative to kPeak

double midi_to_hz(double note) { return 440.0 * std::pow(2.0, (note - 69.0) / 12.0); }

struct Phrase {
    std::vector<double> onsets;  // seconds
    double release = 0.0;        // seconds; everything is damped from here on
};

/// Onset schedule shared by both instruments: notes start at t = 0 and keep
/// coming until a phrase end; the last note rings briefly, then the player
/// damps the strings (or lifts the keys) and the clip ends in room noise.
Phrase phrase_onsets(Rng& rng, double min_gap, double max_gap) {
    const double phrase_end = rng.uniform(3.0, 3.8);
    Phrase p;
    p.onsets.push_back(0.0);
    for (;;) {
        const double next = p.onsets.back() + rng.uniform(min_gap, max_gap);
        if (next > phrase_end) break;
        p.onsets.push_back(next);
    }
    p.release = p.onsets.back() + rng.uniform(0.5, 1.0);
    return p;
}

void damp(std::vector<double>& x, double release) {
    constexpr double kDampTau = 0.06;  // seconds
    const auto from = static_cast<std::size_t>(release * kSampleRate);
    for (std::size_t i = from; i < x.size(); ++i)
        x[i] *= std::exp(-static_cast<double>(i - from) / (kDampTau * kSampleRate));
}

void peak_normalize(std::vector<double>& x) {
    double peak = 0.0;
    for (double v : x) peak = std::max(peak, std::abs(v));
    if (peak > 0.0)
        for (double& v : x) v *= kPeak / peak;
}

/// Stationary pink noise floor, as any recording chain would have. It keeps
/// every band above the encoder's log floor so spectral effects leave a
/// trace regardless of which notes were played.
void add_noise_floor(std::vector<double>& x, Rng& rng) {
    // Kellet's three-pole pinking filter
    std::vector<double> pink(x.size());
    double b0 = 0.0, b1 = 0.0, b2 = 0.0, energy = 0.0;
    for (double& p : pink) {
        const double w = rng.normal();
        b0 = 0.99765 * b0 + w * 0.0990460;
        b1 = 0.96300 * b1 + w * 0.2965164;
        b2 = 0.57000 * b2 + w * 1.0526913;
        p = b0 + b1 + b2 + w * 0.1848;
        energy += p * p;
    }
    const double rms = std::sqrt(energy / static_cast<double>(pink.size()));
    const double gain = kPeak * std::pow(10.0, kNoiseFloorDb / 20.0) / rms;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += gain * pink[i];
}

AudioClip to_clip(const std::vector<double>& x) {
    std::vector<float> mono(x.size());
    std::transform(x.begin(), x.end(), mono.begin(), [](double v) { return static_cast<float>(v); });
    return AudioClip::from_mono(std::move(mono));
}

void pluck(std::vector<double>& out, std::size_t start, double f0, double velocity, Rng& rng) {
    const double fs = kSampleRate;
    const auto period = std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(fs / f0)));
    const std::size_t len = std::min(out.size() - start, static_cast<std::size_t>(3.0 * fs));
    constexpr double kLoss = 0.996;
    constexpr double kBodyDecay = 0.9;  // seconds
    constexpr double kPluckSoftness = 0.88;
    std::vector<double> line(len, 0.0);
    // excitation: noise burst one period long, lowpassed twice (soft pluck)
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < std::min(period, len); ++i) {
        const double noise = rng.uniform(-1.0, 1.0);
        s1 = kPluckSoftness * s1 + (1.0 - kPluckSoftness) * noise;
        s2 = kPluckSoftness * s2 + (1.0 - kPluckSoftness) * s1;
        line[i] = s2;
    }
    for (std::size_t i = period + 1; i < len; ++i)
        line[i] = kLoss * 0.5 * (line[i - period] + line[i - period - 1]);
    for (std::size_t i = 0; i < len; ++i) {
        const double t = static_cast<double>(i) / fs;
        out[start + i] += velocity * line[i] * std::exp(-t / kBodyDecay);
    }
}

}  // namespace

std::vector<double> piano_note(double f0, std::size_t samples, double fs) {
    constexpr std::array<double, 4> kAmps = {1.0, 0.5, 0.25, 0.125};
    constexpr double kDecay = 1.2;    // seconds, fundamental
    constexpr double kAttack = 0.005; // seconds
    std::vector<double> y(samples, 0.0);
    for (std::size_t k = 0; k < kAmps.size(); ++k) {
        const double f = f0 * static_cast<double>(k + 1);
        if (f >= fs / 2) break;
        const double tau = kDecay / static_cast<double>(k + 1);
        const double w = 2.0 * std::numbers::pi * f / fs;
        // damped phasor: exp(-t/tau) * sin(w n) by recursive rotation
        const std::complex<double> step = std::polar(std::exp(-1.0 / (tau * fs)), w);
        std::complex<double> phasor(1.0, 0.0);
        for (std::size_t i = 0; i < samples; ++i) {
            y[i] += kAmps[k] * phasor.imag();
            phasor *= step;
        }
    }
    const auto attack = static_cast<std::size_t>(kAttack * fs);
    for (std::size_t i = 0; i < std::min(attack, samples); ++i)
        y[i] *= static_cast<double>(i) / static_cast<double>(attack);
    return y;
}

std::string synth_source_id(Instrument instrument, std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%04zu", instrument == Instrument::guitar_like ? "guitar" : "piano",
                  index);
    return buf;
}

AudioClip synth_guitar(std::uint64_t seed, std::size_t index) {
    Rng rng(seed, "synth.guitar", index);
    std::vector<double> x(kClipSamples, 0.0);
    // E2 (MIDI 40) .. E5 (MIDI 76)
    const Phrase phrase = phrase_onsets(rng, 0.18, 0.6);
    for (double onset : phrase.onsets) {
        const auto start = static_cast<std::size_t>(onset * kSampleRate);
        const double root = static_cast<double>(rng.uniform_int(40, 64));
        const double velocity = onset == 0.0 ? 1.0 : rng.uniform(0.6, 1.0);
        if (rng.uniform() < 0.3) {
            // strummed power chord: root, fifth, octave 12 ms apart
            const std::array<double, 3> chord = {root, root + 7.0, root + 12.0};
            for (std::size_t s = 0; s < chord.size(); ++s) {
                const std::size_t at = start + s * static_cast<std::size_t>(0.012 * kSampleRate);
                if (at < x.size()) pluck(x, at, midi_to_hz(chord[s]), velocity * 0.7, rng);
            }
        } else {
            const double note = static_cast<double>(rng.uniform_int(40, 76));
            pluck(x, start, midi_to_hz(note), velocity, rng);
        }
    }
    damp(x, phrase.release);
    peak_normalize(x);
    Rng noise(seed, "synth.noise", index);
    add_noise_floor(x, noise);
    return to_clip(x);
}

AudioClip synth_piano(std::uint64_t seed, std::size_t index) {
    Rng rng(seed, "synth.piano", index);
    std::vector<double> x(kClipSamples, 0.0);
    const Phrase phrase = phrase_onsets(rng, 0.2, 0.7);
    for (double onset : phrase.onsets) {
        const auto start = static_cast<std::size_t>(onset * kSampleRate);
        const int voices = rng.uniform() < 0.3 ? 2 : 1;
        for (int v = 0; v < voices; ++v) {
            const double note = static_cast<double>(rng.uniform_int(36, 84));
            const double velocity = onset == 0.0 ? 1.0 : rng.uniform(0.5, 1.0);
            const auto tone = piano_note(midi_to_hz(note), x.size() - start);
            for (std::size_t i = 0; i < tone.size(); ++i) x[start + i] += velocity * tone[i];
        }
    }
    damp(x, phrase.release);
    peak_normalize(x);
    Rng noise(seed, "synth.noise", index);
    add_noise_floor(x, noise);
    return to_clip(x);
}

CorpusManifest synth_corpus(std::size_t n_per_instrument, std::uint64_t seed,
                            const std::filesystem::path& dir) {
    if (n_per_instrument < 1) throw ValidationError("n_per_instrument must be >= 1");
    std::filesystem::create_directories(dir);

    std::vector<Instrument> instruments;
    for (Instrument inst : {Instrument::guitar_like, Instrument::piano_like})
        for (std::size_t i = 0; i < n_per_instrument; ++i) instruments.push_back(inst);
    const auto splits = assign_splits(instruments, seed);

    CorpusManifest manifest;
    manifest.seed = seed;
    for (std::size_t k = 0; k < instruments.size(); ++k) {
        const std::size_t index = k % n_per_instrument;
        const Instrument inst = instruments[k];
        const AudioClip clip = inst == Instrument::guitar_like ? synth_guitar(seed, index) : synth_piano(seed, index);
        ManifestEntry e;
        e.source_id = synth_source_id(inst, index);
        e.clip_id = e.source_id;
        e.source = e.source_id + ".wav";
        e.instrument = inst;
        e.effect = EffectSpec{EffectId::CLN, {}};
        e.split = splits[k];
        write_wav(clip, dir / e.source);
        manifest.entries.push_back(std::move(e));
    }
    return manifest;
}

}  // namespace fxprobe
