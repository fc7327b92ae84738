#include "fxprobe/corpus.h"
#include "fxprobe/errors.h"
#include "fxprobe/loudness.h"
#include "fxprobe/rng.h"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

using namespace fxprobe;

namespace {

AudioClip sine(double f, double amp, double seconds, double fs = 48000) {
    std::vector<float> x(static_cast<std::size_t>(seconds * fs));
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<float>(amp * std::sin(2 * std::numbers::pi * f * i / fs));
    return AudioClip::from_mono(std::move(x), fs);
}

AudioClip scaled(AudioClip c, float g) {
    for (auto& ch : c.channels)
        for (auto& v : ch) v *= g;
    return c;
}

// |H|^2 of the published 48 kHz K-weighting cascade at frequency f.
double k_weight_power(double f) {
    const auto z = std::polar(1.0, -2 * std::numbers::pi * f / 48000.0);
    auto h = [&](double b0, double b1, double b2, double a1, double a2) {
        return (b0 + b1 * z + b2 * z * z) / (1.0 + a1 * z + a2 * z * z);
    };
    const auto hs = h(1.53512485958697, -2.69169618940638, 1.19839281085285, -1.69065929318241, 0.73248077421585);
    const auto hp = h(1.0, -2.0, 1.0, -1.99004745483398, 0.99007225036621);
    return std::norm(hs * hp);
}

}  // namespace

TEST_CASE("full-scale 997 Hz stereo sine measures what the filter response predicts") {
    // mean square 0.5 per channel, summed over two channels, weighted by |H|^2
    const double expected = -0.691 + 10 * std::log10(2 * 0.5 * k_weight_power(997.0));
    CHECK(std::abs((expected) - (0.0)) <= 0.02);
    const auto r = integrated_loudness(sine(997, 1.0, 5.0));
    CHECK(std::abs((r.integrated_lufs) - (expected)) <= 0.01);
    CHECK(r.gated_block_count == 47);
}

TEST_CASE("silence and short clips") {
    const auto r = integrated_loudness(AudioClip::silence(48000));
    CHECK(std::isinf(r.integrated_lufs));
    CHECK(r.integrated_lufs < 0);
    CHECK_THROWS_AS(integrated_loudness(AudioClip::silence(19199)), LengthError);
    CHECK_THROWS_AS(normalize_loudness(AudioClip::silence(48000)), SilenceError);
}

TEST_CASE("half amplitude is 6.02 LU quieter") {
    const auto c = synth_guitar(1, 0);
    const double a = integrated_loudness(c).integrated_lufs;
    const double b = integrated_loudness(scaled(c, 0.5f)).integrated_lufs;
    CHECK(std::abs((a - b) - (20 * std::log10(2.0))) <= 0.05);
}

TEST_CASE("normalization reaches the target on synthetic clips and respects gain linearity") {
    Rng rng(99);
    for (std::size_t i = 0; i < 20; ++i) {
        const auto clip = i % 2 ? synth_piano(5, i) : synth_guitar(5, i);
        const double target = rng.uniform(-30, -14);
        const auto out = normalize_loudness(clip, target);
        CHECK(std::abs(integrated_loudness(out).integrated_lufs - target) <= 0.1);

        const float g = static_cast<float>(rng.uniform(0.1, 1.0));
        const double shift = integrated_loudness(clip).integrated_lufs - integrated_loudness(scaled(clip, g)).integrated_lufs;
        CHECK(std::abs(shift + 20 * std::log10(static_cast<double>(g))) <= 0.05);
    }
}

TEST_CASE("clip at -18 LUFS moves to -23 with a -5 dB gain") {
    const auto src = normalize_loudness(synth_piano(3, 1), -18.0);
    const auto out = normalize_loudness(src, -23.0);
    CHECK(std::abs((integrated_loudness(out).integrated_lufs) - (-23.0)) <= 0.1);
    const double gain_db = 20 * std::log10(std::abs(out[0][1000] / src[0][1000]));
    CHECK(std::abs((gain_db) - (-5.0)) <= 0.1);
    const auto same = normalize_loudness(out, -23.0);
    CHECK(std::abs(20 * std::log10(std::abs(same[0][1000] / out[0][1000]))) <= 0.1);
}

TEST_CASE("loudness is symmetric in the channels") {
    auto c = AudioClip(sine(300, 0.3, 2)[0], sine(2000, 0.1, 2)[0]);
    auto swapped = AudioClip(c[1], c[0]);
    CHECK(integrated_loudness(c).integrated_lufs == doctest::Approx(integrated_loudness(swapped).integrated_lufs));
}
